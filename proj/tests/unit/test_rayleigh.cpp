#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "doctest.h"

#include "frachardy/error.hpp"
#include "frachardy/grid.hpp"
#include "frachardy/rayleigh.hpp"

using namespace frachardy;

namespace {

Point on_axis(double x) {
    Point p{};
    p[0] = x;
    return p;
}

// mu from a dense generalized eigenproblem on the mean-zero subspace (N = 1).
double dense_mu(const ThetaPotential& v, const SpectralGrid& g) {
    const int n = g.n();
    const double h = g.spacing(), L = g.half_width(), s = g.params().s;
    const auto vbar = cell_averages(v, g);
    Eigen::MatrixXd A(n, n), B = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        B(i, i) = h * vbar[i];
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = -n / 2; k < n / 2; ++k) {
                const double xi = std::numbers::pi * k / L;
                acc += std::pow(std::abs(xi), 2.0 * s) * std::cos(2.0 * std::numbers::pi * k * (i - j) / n);
            }
            A(i, j) = h / n * acc;
        }
    }
    // Orthonormal basis of the complement of the constants.
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> proj(M);
    const Eigen::MatrixXd Q = proj.eigenvectors().rightCols(n - 1);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Q.transpose() * B * Q, Q.transpose() * A * Q);
    return 1.0 - es.eigenvalues().maxCoeff();
}

}  // namespace

TEST_CASE("Gagliardo energy of a single mode") {
    for (double s : {0.1, 0.25, 0.45}) {
        const auto g = SpectralGrid::make(FracParams::make(1, s), 256, 8.0);
        const double xi = std::numbers::pi * 5 / 8.0;
        const auto u = DiscreteField::sample(g, [&](const Point& x) { return std::cos(xi * x[0]); });
        CHECK(rayleigh::dsnorm_sq(u) == doctest::Approx(8.0 * std::pow(xi, 2.0 * s)).epsilon(1e-12));
        CHECK(u.l2_norm_sq() == doctest::Approx(8.0).epsilon(1e-12));
    }
    const auto g2 = SpectralGrid::make(FracParams::make(2, 0.5), 64, 4.0);
    const double k = std::numbers::pi / 4.0;
    const auto u2 = DiscreteField::sample(g2, [&](const Point& x) { return std::sin(3 * k * x[0] + 4 * k * x[1]); });
    CHECK(rayleigh::dsnorm_sq(u2) == doctest::Approx(32.0 * 5 * k).epsilon(1e-12));
}

TEST_CASE("Lanczos mu against a dense eigensolver") {
    const auto P = FracParams::make(1, 0.3);
    const auto g = SpectralGrid::make(P, 64, 8.0);
    Remainder rem;
    rem.terms.emplace_back(GaussianBump{on_axis(2.0), 0.3, 0.7});
    const auto v = ThetaPotential::make(P, {Pole{on_axis(-1.0), 0.6 * P.gamma_hardy, 1.0}}, 0.0, 1.0, rem);
    const auto r = rayleigh::mu(v, g);
    CHECK(r.mu == doctest::Approx(dense_mu(v, g)).epsilon(1e-7));
    CHECK(r.residual <= 1e-8);
    // The minimizer attains the value.
    const double q = rayleigh::dsnorm_sq(r.minimizer) - rayleigh::potential_energy(r.minimizer, v);
    CHECK(q / rayleigh::dsnorm_sq(r.minimizer) == doctest::Approx(r.mu).epsilon(1e-7));
}

TEST_CASE("elementary values of mu") {
    const auto P = FracParams::make(1, 0.25);
    const auto g = SpectralGrid::make(P, 1024, 16.0);
    CHECK(rayleigh::mu(ThetaPotential::zero(P), g).mu == doctest::Approx(1.0).epsilon(1e-12));
    // V <= 0 gives mu >= 1 in the discrete setting.
    const auto neg = ThetaPotential::make(P, {Pole{Point{}, -0.5, 1.0}});
    CHECK(rayleigh::mu(neg, g).mu >= 1.0 - 1e-10);
    // Monotone in the mass.
    double prev = 1.0;
    for (double f : {0.2, 0.4, 0.6, 0.8}) {
        const double m = rayleigh::mu(ThetaPotential::make(P, {Pole{Point{}, f * P.gamma_hardy, 1.0}}), g).mu;
        CHECK(m < prev);
        prev = m;
    }
    // The discrete Hardy inequality holds: mu >= 0 even at the critical mass.
    CHECK(rayleigh::mu(ThetaPotential::full_pole(P, P.gamma_hardy), g).mu > 0.0);
}

TEST_CASE("full pole: refinement approaches 1 - lambda/gamma_H from above") {
    const auto P = FracParams::make(1, 0.25);
    const auto v = ThetaPotential::full_pole(P, 0.5 * P.gamma_hardy);
    double prev = 2.0;
    for (int n : {512, 1024, 2048, 4096}) {
        const double m = rayleigh::mu(v, SpectralGrid::make(P, n, 32.0)).mu;
        CHECK(m > 0.5);
        CHECK(m < prev);
        prev = m;
    }
}

TEST_CASE("grid-aligned translation leaves mu unchanged") {
    const auto P = FracParams::make(2, 0.5);
    const auto g = SpectralGrid::make(P, 64, 8.0);
    Point b{};
    b[0] = 1.5;
    b[1] = -1.0;
    const auto v = ThetaPotential::make(P, {Pole{Point{}, 0.4 * P.gamma_hardy, 1.0}, Pole{b, 0.2, 1.0}});
    Point y{};
    y[0] = 4 * g.spacing();
    y[1] = -2 * g.spacing();
    CHECK(rayleigh::mu(translate(v, y), g).mu == doctest::Approx(rayleigh::mu(v, g).mu).epsilon(1e-6));
}

TEST_CASE("geometry errors") {
    const auto P = FracParams::make(1, 0.25);
    const auto g = SpectralGrid::make(P, 512, 8.0);
    CHECK_THROWS_AS(rayleigh::mu(ThetaPotential::make(P, {Pole{on_axis(7.5), 0.1, 1.0}}), g), GeometryError);
    const auto v = ThetaPotential::make(P, {Pole{Point{}, 0.1, 1.0}});
    CHECK_THROWS_AS(rayleigh::binding_sweep(v, v, on_axis(1.0), {2.0, 20.0}, g), GeometryError);
    const auto base = rayleigh::hardy_profile(P, 1.0 / 32, 1.0);
    CHECK_THROWS_AS(rayleigh::scaled_family_probe(v, base, {16.0}, Point{}, g), GeometryError);
    // Truncation radius below two cells.
    CHECK_THROWS_AS(cell_averages(ThetaPotential::make(P, {Pole{Point{}, 0.1, 0.02}}), g), ResolutionError);
}

TEST_CASE("binding sweep") {
    const auto P = FracParams::make(1, 0.25);
    const auto g = SpectralGrid::make(P, 2048, 32.0);
    const auto v = ThetaPotential::make(P, {Pole{Point{}, 0.8 * P.gamma_hardy, 1.0}});
    const auto sw = rayleigh::binding_sweep(v, v, on_axis(1.0), {8.0, 2.0, 4.0}, g, 2);
    REQUIRE(sw.rows.size() == 3);
    CHECK(sw.rows[0].radius == 2.0);
    CHECK(sw.rows[2].radius == 8.0);
    CHECK(sw.rows[0].mu < sw.rows[2].mu);
    CHECK(sw.rows[2].mu > 0.0);
    CHECK(sw.rows[2].mu <= sw.mu_v1 + 1e-6);
    // Same result with one worker.
    const auto one = rayleigh::binding_sweep(v, v, on_axis(1.0), {8.0, 2.0, 4.0}, g, 1);
    for (std::size_t k = 0; k < 3; ++k) CHECK(one.rows[k].mu == sw.rows[k].mu);
}

TEST_CASE("scaled family probe") {
    const auto P = FracParams::make(1, 0.25);
    const auto g = SpectralGrid::make(P, 2048, 32.0);
    const auto base = rayleigh::hardy_profile(P, 1.0 / 32, 1.0);
    // Zero potential: every Rayleigh value is 1.
    for (const auto& r : rayleigh::scaled_family_probe(ThetaPotential::zero(P), base, {1, 4, 16}, Point{}, g)) {
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    }
    // A pole lowers the value, never below the discrete mu.
    const auto v = ThetaPotential::full_pole(P, 0.7 * P.gamma_hardy);
    const double m = rayleigh::mu(v, g).mu;
    for (const auto& r : rayleigh::scaled_family_probe(v, base, {1, 4, 16}, Point{}, g)) {
        CHECK(r.value < 1.0);
        CHECK(r.value >= m - 1e-9);
    }
}

TEST_CASE("configuration search") {
    const auto P = FracParams::make(1, 0.25);
    const auto g = SpectralGrid::make(P, 2048, 32.0);
    const auto found = rayleigh::find_positive_configuration({0.3 * P.gamma_hardy, 0.4 * P.gamma_hardy}, g, 3);
    CHECK(found.status == rayleigh::ConfigurationReport::Status::Found);
    CHECK(found.positions.size() == 2);
    CHECK(found.mu >= 0.02);
    const auto none = rayleigh::find_positive_configuration({0.6 * P.gamma_hardy, 0.6 * P.gamma_hardy}, g, 3);
    CHECK(none.status == rayleigh::ConfigurationReport::Status::Impossible);
    CHECK_FALSE(none.witness.empty());
    CHECK(rayleigh::to_string(none.status) == "impossible");
}

TEST_CASE("norms and the Sobolev constant") {
    const auto P = FracParams::make(1, 0.25);
    const auto g = SpectralGrid::make(P, 1024, 16.0);
    std::vector<double> ones(g.size(), 1.0);
    CHECK(rayleigh::lebesgue_norm(ones, g, 2.0) == doctest::Approx(std::sqrt(32.0)).epsilon(1e-12));
    const double S = rayleigh::sobolev_constant(g);
    CHECK(S > 0.0);
    // S bounds the Sobolev quotient of an arbitrary field from below.
    const auto u = DiscreteField::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]) * (1 + x[0]); });
    auto w = u;
    w.project_mean_zero();
    const double q = rayleigh::dsnorm_sq(w) / std::pow(rayleigh::lebesgue_norm(w.values, g, P.sobolev_exponent()), 2);
    CHECK(q >= S * (1.0 - 1e-6));
}
