#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "doctest.h"

#include "frachardy/error.hpp"
#include "frachardy/specfun.hpp"

using namespace frachardy;
using mp = boost::multiprecision::cpp_bin_float_50;

namespace {

double mp_gamma(double x) { return static_cast<double>(boost::math::tgamma(mp(x))); }

// gamma_H from the closed form, evaluated in 50-digit arithmetic.
double mp_gamma_hardy(int N, double s) {
    const mp n(N), ss(s);
    const mp r = boost::math::tgamma((n + 2 * ss) / 4) / boost::math::tgamma((n - 2 * ss) / 4);
    return static_cast<double>(boost::multiprecision::pow(mp(2), 2 * ss) * r * r);
}

}  // namespace

TEST_CASE("gamma against 50-digit reference") {
    for (double x : {1e-3, 0.1, 0.25, 0.5, 1.0, 1.5, 2.75, 7.3, 20.0, 120.5}) {
        CHECK(gamma_fn(x) == doctest::Approx(mp_gamma(x)).epsilon(1e-13));
        CHECK(log_gamma(x) == doctest::Approx(std::log(mp_gamma(x))).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-1.5), DomainError);
}

TEST_CASE("kappa_s, C(N,s) and gamma_H") {
    CHECK(kappa_s(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        // kappa_s = 2^{1-2s} Gamma(1-s) / Gamma(s)
        const double ref = static_cast<double>(boost::multiprecision::pow(mp(2), 1 - 2 * mp(s)) *
                                               boost::math::tgamma(1 - mp(s)) / boost::math::tgamma(mp(s)));
        CHECK(kappa_s(s) == doctest::Approx(ref).epsilon(1e-13));
    }
    // C(1, 1/2) = 1 / pi; in general s 2^{2s} Gamma((N+2s)/2) / (pi^{N/2} Gamma(1-s)).
    CHECK(c_ns(1, 0.5) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    for (int N : {1, 2, 3}) {
        for (double s : {0.25, 0.4}) {
            const mp ref = mp(s) * boost::multiprecision::pow(mp(2), 2 * mp(s)) *
                           boost::math::tgamma((mp(N) + 2 * mp(s)) / 2) /
                           (boost::multiprecision::pow(boost::math::constants::pi<mp>(), mp(N) / 2) *
                            boost::math::tgamma(1 - mp(s)));
            CHECK(c_ns(N, s) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
            CHECK(FracParams::make(N, s).gamma_hardy == doctest::Approx(mp_gamma_hardy(N, s)).epsilon(1e-13));
        }
    }
    // Classical case N = 3, s = 1/2: gamma_H = 2 / pi.
    CHECK(FracParams::make(3, 0.5).gamma_hardy == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(FracParams::make(1, 0.5), DomainError);
    CHECK_THROWS_AS(FracParams::make(0, 0.25), DomainError);
    CHECK_THROWS_AS(FracParams::make(2, 1.0), DomainError);
    CHECK_THROWS_AS(FracParams::make(2, 0.0), DomainError);
    const auto P = FracParams::make(2, 0.5);
    CHECK(P.half_gap() == doctest::Approx(0.5));
    CHECK(P.sobolev_exponent() == doctest::Approx(4.0));
}

TEST_CASE("Lambda: limits, monotonicity, inverse") {
    for (auto [N, s] : {std::pair{1, 0.25}, std::pair{2, 0.5}, std::pair{3, 0.75}}) {
        const auto P = FracParams::make(N, s);
        const double c = P.half_gap();
        CHECK(lambda_of_alpha(P, 1e-6 * c) == doctest::Approx(P.gamma_hardy).epsilon(1e-8));
        CHECK(lambda_of_alpha(P, (1 - 1e-6) * c) < 1e-4 * P.gamma_hardy);
        double prev = P.gamma_hardy;
        for (int k = 1; k < 50; ++k) {
            const double a = c * k / 50.0, lam = lambda_of_alpha(P, a);
            CHECK(lam < prev);
            prev = lam;
            CHECK(alpha_of_lambda(P, lam) == doctest::Approx(a).epsilon(1e-10));
            // mu_1(Lambda(alpha)) = alpha^2 - c^2 and a_lambda = alpha - c.
            CHECK(mu1_of_lambda(P, lam) == doctest::Approx(a * a - c * c).epsilon(1e-9));
            CHECK(a_lambda(P, lam) == doctest::Approx(a - c).epsilon(1e-9));
        }
        CHECK_THROWS_AS(lambda_of_alpha(P, 0.0), DomainError);
        CHECK_THROWS_AS(lambda_of_alpha(P, c), DomainError);
        CHECK(mu1_of_lambda(P, 0.0) == 0.0);
    }
}

TEST_CASE("negative masses raise the first angular eigenvalue") {
    const auto P = FracParams::make(1, 0.25);
    CHECK(mu1_of_lambda(P, -0.05) > 0.0);
    CHECK(mu1_of_lambda(P, -0.1) > mu1_of_lambda(P, -0.05));
}
