#include "frachardy/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "frachardy/angular.hpp"
#include "frachardy/error.hpp"

namespace frachardy {

namespace {

// Lanczos series, g = 7, nine terms.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

void require_positive(double x, const char* what) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw DomainError(std::string(what) + ": argument must be finite and positive, got " +
                          std::to_string(x));
    }
}

// Series part A_g(z) for Gamma(z + 1), z >= 0.
double lanczos_sum(double z) {
    double sum = kLanczosCoef[0];
    for (std::size_t i = 1; i < kLanczosCoef.size(); ++i) {
        sum += kLanczosCoef[i] / (z + static_cast<double>(i));
    }
    return sum;
}

}  // namespace

double gamma_fn(double x) {
    require_positive(x, "gamma_fn");
    // Shift small arguments up so the series sees z >= 0.5.
    double scale = 1.0;
    while (x < 1.5) {
        scale /= x;
        x += 1.0;
    }
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    // Split the power to keep t^(z+0.5) finite for x up to ~170.
    const double half = std::pow(t, 0.5 * (z + 0.5));
    return scale * std::sqrt(2.0 * std::numbers::pi) * half * (half * std::exp(-t)) *
           lanczos_sum(z);
}

double log_gamma(double x) {
    require_positive(x, "log_gamma");
    double log_scale = 0.0;
    while (x < 1.5) {
        log_scale -= std::log(x);
        x += 1.0;
    }
    const double z = x - 1.0;
    const double t = z + kLanczosG + 0.5;
    return log_scale + 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
           std::log(lanczos_sum(z));
}

double kappa_s(double s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("kappa_s: s must lie in (0,1)");
    return gamma_fn(1.0 - s) / (std::pow(2.0, 2.0 * s - 1.0) * gamma_fn(s));
}

double c_ns(int N, double s) {
    return std::pow(std::numbers::pi, -0.5 * N) * std::pow(2.0, 2.0 * s) *
           gamma_fn(0.5 * (N + 2.0 * s)) / gamma_fn(2.0 - s) * s * (1.0 - s);
}

double gamma_hardy(const FracParams& p) {
    const double r = gamma_fn(0.25 * (p.N + 2.0 * p.s)) / gamma_fn(0.25 * (p.N - 2.0 * p.s));
    return std::pow(2.0, 2.0 * p.s) * r * r;
}

FracParams FracParams::make(int N, double s) {
    if (N < 1) throw DomainError("FracParams: N must be >= 1");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("FracParams: s must lie in (0,1)");
    if (!(N > 2.0 * s)) throw DomainError("FracParams: need N > 2s");
    FracParams p;
    p.N = N;
    p.s = s;
    p.c_ns = frachardy::c_ns(N, s);
    p.kappa_s = frachardy::kappa_s(s);
    p.gamma_hardy = frachardy::gamma_hardy(p);
    return p;
}

double lambda_of_alpha(const FracParams& p, double alpha) {
    const double c = p.half_gap();
    if (!(alpha > 0.0 && alpha < c)) {
        throw DomainError("lambda_of_alpha: alpha must lie in (0, (N-2s)/2)");
    }
    const double n = p.N, s2 = 2.0 * p.s, a2 = 2.0 * alpha;
    const double log_ratio = log_gamma(0.25 * (n + s2 + a2)) + log_gamma(0.25 * (n + s2 - a2)) -
                             log_gamma(0.25 * (n - s2 + a2)) - log_gamma(0.25 * (n - s2 - a2));
    return std::pow(2.0, s2) * std::exp(log_ratio);
}

double alpha_of_lambda(const FracParams& p, double lambda) {
    if (!(lambda > 0.0 && lambda < p.gamma_hardy)) {
        throw DomainError("alpha_of_lambda: lambda must lie in (0, gamma_H)");
    }
    // Lambda is decreasing: large alpha <-> small lambda.
    double lo = 0.0, hi = p.half_gap();
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= 0.0 || mid >= p.half_gap()) break;
        if (lambda_of_alpha(p, mid) > lambda) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double mu1_of_lambda(const FracParams& p, double lambda) {
    if (!(lambda < p.gamma_hardy)) throw DomainError("mu1_of_lambda: lambda must be < gamma_H");
    if (lambda == 0.0) return 0.0;
    if (lambda > 0.0) {
        const double a = alpha_of_lambda(p, lambda);
        const double c = p.half_gap();
        return a * a - c * c;
    }
    return angular::mu_k(lambda, 1, angular::AngularGrid::make(p, 2048)).mu_values.front();
}

double a_lambda(const FracParams& p, double lambda) {
    const double c = p.half_gap();
    const double radicand = c * c + mu1_of_lambda(p, lambda);
    if (!(radicand > 0.0)) throw ResolutionError("a_lambda: non-positive radicand");
    return -c + std::sqrt(radicand);
}

}  // namespace frachardy
