#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "frachardy/error.hpp"
#include "frachardy/extension.hpp"

using namespace frachardy;
using namespace frachardy::extension;

namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("zero data extends to zero; traces are preserved") {
    const auto g = SpectralGrid::make(FracParams::make(1, 0.3), 128, 8.0);
    const auto tg = TGrid::make(20.0, 64, 0.3);
    const auto U0 = extend(DiscreteField::zeros(g), tg);
    CHECK(energy(U0) == 0.0);
    CHECK(*std::max_element(U0.values.begin(), U0.values.end()) == 0.0);
    CHECK(*std::min_element(U0.values.begin(), U0.values.end()) == 0.0);

    const auto u = DiscreteField::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]) + 0.2; });
    const auto U = extend(u, tg);
    CHECK(max_abs_diff(U.trace().values, u.values) <= 1e-12);
}

TEST_CASE("mode profiles collapse under rescaling") {
    for (double s : {0.25, 0.5, 0.8}) {
        const auto tg1 = TGrid::make(10.0, 200, s);
        const auto tg2 = TGrid::make(5.0, 200, s);
        const auto p1 = solve_mode_profile(1.0, tg1);
        const auto p2 = solve_mode_profile(2.0, tg2);
        CHECK(max_abs_diff(p1.values, p2.values) <= 1e-6);
        CHECK(p2.energy / p1.energy == doctest::Approx(std::pow(2.0, 2.0 * s)).epsilon(1e-9));
        CHECK(p1.values.front() == 1.0);
        CHECK(p1.values.back() == 0.0);
    }
}

TEST_CASE("the extension minimizes energy among fields with the same trace") {
    const auto P = FracParams::make(1, 0.4);
    const auto g = SpectralGrid::make(P, 64, 4.0);
    const auto tg = TGrid::make(10.0, 64, P.s);
    const auto u = DiscreteField::sample(g, [](const Point& x) { return std::cos(x[0]) + std::sin(2.5 * x[0]); });
    const auto U = extend(u, tg);
    const double e0 = energy(U);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd(0.0, 1e-3);
    for (int trial = 0; trial < 5; ++trial) {
        auto W = U;
        for (std::size_t j = 1; j + 1 < W.rows(); ++j) {
            for (double& x : W.row(j)) x += nd(rng);
        }
        CHECK(energy(W) > e0);
    }
}

TEST_CASE("extension energy equals kappa_s times the fractional energy") {
    for (int N : {1, 2}) {
        for (double s : {0.25, 0.5}) {
            if (N == 1 && s == 0.5) continue;
            const auto P = FracParams::make(N, s);
            const int n = N == 1 ? 256 : 32;
            const auto g = SpectralGrid::make(P, n, 8.0);
            const double xi_min = std::numbers::pi / 8.0;
            const auto tg = TGrid::make(10.0 / xi_min, 400, s);
            const auto u = DiscreteField::sample(g, [&](const Point& x) {
                return std::cos(2 * xi_min * x[0]) + 0.5 * std::sin(5 * xi_min * x[N - 1]);
            });
            const auto U = extend(u, tg);
            CHECK(energy(U) / rayleigh::dsnorm_sq(u) == doctest::Approx(P.kappa_s).epsilon(1e-3));

            // Per-mode multipliers carry the same constant.
            const auto m = extension_multiplier(g, tg);
            CHECK(m[0] == 0.0);
        }
    }
}

TEST_CASE("trace inequality: extension energy bounds the trace energy") {
    const auto P = FracParams::make(1, 0.3);
    const auto g = SpectralGrid::make(P, 128, 8.0);
    const auto tg = TGrid::make(80.0, 200, P.s);
    const auto u = DiscreteField::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]) * (1 + x[0]); });
    auto W = extend(u, tg);
    // Any field with this trace has energy at least kappa_s ||u||^2 (up to discretization).
    for (std::size_t j = 1; j + 1 < W.rows(); ++j) {
        for (double& x : W.row(j)) x *= 1.1;
    }
    CHECK(energy(W) >= P.kappa_s * rayleigh::dsnorm_sq(u) * (1.0 - 1e-3));
}

TEST_CASE("Neumann flux of a single mode") {
    const auto P = FracParams::make(1, 0.25);
    const auto g = SpectralGrid::make(P, 256, 8.0);
    const double xi = 3 * std::numbers::pi / 8.0;
    const auto tg = TGrid::make(80.0, 400, P.s);
    const auto u = DiscreteField::sample(g, [&](const Point& x) { return std::cos(xi * x[0]); });
    const auto flux = neumann_flux(extend(u, tg));
    const double scale = P.kappa_s * std::pow(xi, 2.0 * P.s);
    for (std::size_t i = 0; i < g.size(); i += 17) {
        CHECK(flux[i] == doctest::Approx(scale * u.values[i]).epsilon(2e-3).scale(scale));
    }
}

TEST_CASE("mu from the extended quotient") {
    const auto P = FracParams::make(1, 0.25);
    const auto g = SpectralGrid::make(P, 512, 16.0);
    const auto tg = TGrid::make(10.0 * 16.0 / std::numbers::pi, 200, P.s);
    CHECK(mu_extended(ThetaPotential::zero(P), g, tg).mu == doctest::Approx(1.0).epsilon(1e-12));
    const auto v = ThetaPotential::full_pole(P, 0.5 * P.gamma_hardy);
    CHECK(std::abs(mu_extended(v, g, tg).mu - rayleigh::mu(v, g).mu) <= 2e-2);
}

TEST_CASE("certificate check") {
    const auto P = FracParams::make(1, 0.25);
    const auto g = SpectralGrid::make(P, 512, 16.0);
    const auto tg = TGrid::make(50.0, 100, P.s);
    std::vector<double> zeros(g.size(), 0.0);

    // Constant phi and V = 0: every test value is zero, any epsilon works.
    auto ones = DiscreteField::zeros(g);
    std::fill(ones.values.begin(), ones.values.end(), 1.0);
    Certificate flat{extend(ones, tg), 0.3, zeros, zeros, {}};
    CHECK(certificate_check(flat, 16).pass);
    CHECK(std::isinf(certificate_max_epsilon(flat, 16)));

    // A sign-changing phi is rejected.
    auto neg = flat;
    for (double& x : neg.phi.values) x = -x;
    CHECK_THROWS_AS(certificate_check(neg, 16), PreconditionError);

    // Upsilon certifies a bound below the discrete mu.
    const auto gu = SpectralGrid::make(P, 4096, 32.0);
    const auto tu = TGrid::make(10.0 * 32.0 / std::numbers::pi, 400, P.s);
    const double alpha = 0.5 * P.half_gap();
    const double lam = lambda_of_alpha(P, alpha);
    const auto V = ThetaPotential::full_pole(P, lam);
    const auto vbar = cell_averages(V, gu);
    std::vector<double> vt(vbar.size());
    std::transform(vbar.begin(), vbar.end(), vt.begin(), [](double x) { return std::abs(x); });
    Certificate cert{build_upsilon(alpha, gu, tu), 0.0, vbar, vt, {Point{}}};
    cert.epsilon = certificate_max_epsilon(cert, 32);
    REQUIRE(cert.epsilon > 0.0);
    const auto verdict = certificate_check(cert, 32);
    CHECK(verdict.pass);
    CHECK(verdict.bound == doctest::Approx(cert.epsilon / (1 + cert.epsilon)));
    CHECK(verdict.bound <= rayleigh::mu(V, gu).mu + 2e-2);
    cert.epsilon *= 1.01;
    CHECK_FALSE(certificate_check(cert, 32).pass);
}

TEST_CASE("Upsilon: trace, sign and flux") {
    const auto P = FracParams::make(1, 0.25);
    const double c = P.half_gap(), alpha = 0.5 * c;
    const double L = 512.0;
    const auto g = SpectralGrid::make(P, 65536, L);
    const double h = g.spacing();
    const auto tg = TGrid::make(10.0 * L / std::numbers::pi, 100, P.s);
    const auto U = build_upsilon(alpha, g, tg);
    CHECK(*std::min_element(U.values.begin(), U.values.end()) > 0.0);

    const auto tr = U.trace();
    const auto flux = neumann_flux(U);
    const double lam = lambda_of_alpha(P, alpha);
    double worst_trace = 0.0, worst_flux = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = std::abs(g.coordinate(i)[0]);
        if (r < 0.5 * h) continue;
        worst_trace = std::max(worst_trace, std::abs(tr.values[i] - std::pow(r, -c + alpha)));
        if (r >= 4 * h && r <= L / 512) {
            const double ref = P.kappa_s * lam * std::pow(r, -2.0 * P.s) * tr.values[i];
            worst_flux = std::max(worst_flux, std::abs(flux[i] / ref - 1.0));
        }
    }
    CHECK(worst_trace <= 1e-6);
    CHECK(worst_flux <= 0.05);
}
