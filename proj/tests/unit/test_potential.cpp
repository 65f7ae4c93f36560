#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"

#include "frachardy/error.hpp"
#include "frachardy/potential.hpp"
#include "frachardy/quadrature.hpp"

using namespace frachardy;

namespace {

std::vector<Point> sample_points(int N, int count, std::uint64_t seed, double spread) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-spread, spread);
    std::vector<Point> out;
    for (int k = 0; k < count; ++k) {
        Point p{};
        for (int i = 0; i < N; ++i) p[i] = d(rng);
        out.push_back(p);
    }
    return out;
}

ThetaPotential mixed(const FracParams& P) {
    Point a{}, b{}, g{};
    a[0] = 0.7;
    b[0] = -1.9;
    g[0] = 2.5;
    if (P.N > 1) {
        a[1] = 0.3;
        b[1] = 0.8;
    }
    Remainder rem;
    rem.terms.emplace_back(GaussianBump{g, -0.3, 0.8});
    return ThetaPotential::make(P, {Pole{a, 0.3 * P.gamma_hardy, 0.5}, Pole{b, -0.2, 0.4}}, 0.25 * P.gamma_hardy, 6.0,
                                rem);
}

// Values away from every centre, where pointwise evaluation is defined.
bool safe(const ThetaPotential& v, const Point& x) {
    for (const auto& p : v.poles) {
        if (distance(x, p.a) < 1e-3) return false;
    }
    return norm(x) > 1e-3;
}

// Gauss-Legendre tensor average of f over the cube of side w centred at c (smooth f only).
template <class F>
double cube_average(int N, const Point& c, double w, F&& f) {
    const auto& r = quad::gauss_legendre(24);
    const std::size_t m = r.nodes.size();
    double acc = 0.0;
    std::size_t total = 1;
    for (int k = 0; k < N; ++k) total *= m;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        double wt = 1.0;
        Point x = c;
        for (int k = 0; k < N; ++k) {
            const std::size_t i = rest % m;
            rest /= m;
            x[k] += 0.5 * w * r.nodes[i];
            wt *= 0.5 * r.weights[i];
        }
        acc += wt * f(x);
    }
    return acc;
}

}  // namespace

TEST_CASE("cutoffs") {
    CHECK(zeta(0.0) == 1.0);
    CHECK(zeta(0.5) == 1.0);
    CHECK(zeta(1.0) == 0.0);
    CHECK(zeta(3.0) == 0.0);
    double prev = 1.0;
    for (int k = 1; k < 100; ++k) {
        const double z = zeta(0.5 + 0.5 * k / 100.0);
        CHECK(z <= prev);
        CHECK(z >= 0.0);
        prev = z;
    }
    CHECK(zeta_tilde(0.5) == 0.0);
    CHECK(zeta_tilde(1.0) == 0.0);
    CHECK(zeta_tilde(2.0) == 1.0);
    CHECK(zeta_tilde(1.5) == doctest::Approx(zeta(1.0 / 1.5)));
}

TEST_CASE("construction and validation") {
    const auto P = FracParams::make(2, 0.5);
    CHECK_THROWS_AS(ThetaPotential::make(P, {Pole{Point{}, 0.1, 1.0}, Pole{Point{}, 0.2, 2.0}}), StructuralError);
    CHECK_THROWS_AS(ThetaPotential::make(P, {Pole{Point{}, 0.1, -1.0}}), StructuralError);
    CHECK_THROWS_AS(evaluate(ThetaPotential::full_pole(P, 0.1), Point{}), DomainError);

    // Overlapping balls are shrunk; the pointwise values stay exact.
    Point a{}, b{};
    b[0] = 1.0;
    const auto v = ThetaPotential::make(P, {Pole{a, 0.2, 0.8}, Pole{b, 0.1, 0.8}});
    CHECK(v.poles[0].r + v.poles[1].r <= 1.0 + 1e-12);
    for (const auto& x : sample_points(2, 200, 5, 2.0)) {
        if (!safe(v, x)) continue;
        double direct = 0.0;
        if (distance(x, a) < 0.8) direct += 0.2 / std::pow(distance(x, a), 1.0);
        if (distance(x, b) < 0.8) direct += 0.1 / std::pow(distance(x, b), 1.0);
        CHECK(evaluate(v, x) == doctest::Approx(direct).epsilon(1e-12));
    }

    const auto rep = validate_theta(ThetaPotential::make(P, {Pole{a, 0.6 * P.gamma_hardy, 0.5},
                                                             Pole{b, 0.6 * P.gamma_hardy, 0.3}}),
                                    P);
    CHECK(rep.valid);
    CHECK(rep.sum_positive == doctest::Approx(1.2 * P.gamma_hardy));
    CHECK_FALSE(rep.all_configurations_positive);
    CHECK_FALSE(rep.some_configuration_positive);
    const auto ok = validate_theta(ThetaPotential::make(P, {Pole{a, 0.6 * P.gamma_hardy, 0.5}, Pole{b, -1.0, 0.3}}), P);
    CHECK(ok.all_configurations_positive);
}

TEST_CASE("translation and sums are exact pointwise") {
    for (int N : {1, 2, 3}) {
        const auto P = FracParams::make(N, 0.25);
        const auto v = mixed(P);
        Point y{};
        y[0] = 1.25;
        if (N > 1) y[1] = -0.5;
        const auto t = translate(v, y);
        for (const auto& x : sample_points(N, 100, 7, 8.0)) {
            if (!safe(v, x - y) || !safe(t, x) || norm(x - y) < 1e-3) continue;
            CHECK(evaluate(t, x) == doctest::Approx(evaluate(v, x - y)).epsilon(1e-12));
        }
        const auto w = ThetaPotential::full_pole(P, 0.1, y);
        const auto sum = add(v, w);
        for (const auto& x : sample_points(N, 100, 8, 8.0)) {
            if (!safe(sum, x)) continue;
            CHECK(evaluate(sum, x) == doctest::Approx(evaluate(v, x) + evaluate(w, x)).epsilon(1e-12));
        }
        CHECK_THROWS_AS(add(v, translate(ThetaPotential::full_pole(P, 0.1), v.poles[0].a)), StructuralError);
    }
}

TEST_CASE("Kelvin transform: pointwise identity and involution") {
    for (int N : {1, 2, 3}) {
        const auto P = FracParams::make(N, 0.25);
        const auto v = mixed(P);
        const auto k = kelvin(v);
        const auto kk = kelvin(k);
        for (const auto& x : sample_points(N, 200, 11, 6.0)) {
            const double r2 = norm(x) * norm(x);
            const Point xi = (1.0 / r2) * x;
            if (!safe(v, x) || !safe(v, xi) || !safe(k, x) || !safe(kk, x)) continue;
            const double expect = std::pow(norm(x), -4.0 * P.s) * evaluate(v, xi);
            CHECK(std::abs(evaluate(k, x) - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
            CHECK(std::abs(evaluate(kk, x) - evaluate(v, x)) <= 1e-10 * std::max(1.0, std::abs(evaluate(v, x))));
        }
        // The origin pole and the exterior term trade places.
        const auto e = kelvin(ThetaPotential::make(P, {Pole{Point{}, 0.2, 0.5}}));
        CHECK(e.poles.empty());
        CHECK(e.lambda_inf == doctest::Approx(0.2));
        CHECK(e.r_inf == doctest::Approx(2.0));
    }
}

TEST_CASE("cell averages") {
    SUBCASE("N = 1 against the closed form") {
        const auto P = FracParams::make(1, 0.25);
        const auto v = ThetaPotential::full_pole(P, 1.0);
        const double w = 0.1, e = 1.0 - 2.0 * P.s;
        // Cell containing the pole.
        const double ref0 = 2.0 * std::pow(0.5 * w, e) / e / w;
        CHECK(cell_average(v, Point{}, w) == doctest::Approx(ref0).epsilon(1e-12));
        // Near cells are integrated exactly, far ones by the midpoint rule.
        for (double c : {0.1, 0.25}) {
            const double ref = (std::pow(c + 0.5 * w, e) - std::pow(c - 0.5 * w, e)) / e / w;
            CHECK(cell_average(v, Point{c}, w) == doctest::Approx(ref).epsilon(1e-12));
        }
        const double far = (std::pow(1.05, e) - std::pow(0.95, e)) / e / w;
        CHECK(std::abs(cell_average(v, Point{1.0}, w) - far) <= w * w * far);
    }
    SUBCASE("N = 2 pole cell against polar integration") {
        const auto P = FracParams::make(2, 0.5);
        const double w = 0.2, p = 2.0 - 2.0 * P.s;
        const auto& r = quad::gauss_legendre(32);
        double acc = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            const double th = std::numbers::pi / 8.0 * (1.0 + r.nodes[i]);
            acc += std::numbers::pi / 8.0 * r.weights[i] * std::pow(0.5 * w / std::cos(th), p);
        }
        const double ref = 8.0 * acc / p / (w * w);
        CHECK(cell_average(ThetaPotential::full_pole(P, 1.0), Point{}, w) == doctest::Approx(ref).epsilon(1e-9));
        CHECK(radial_power_cell_average(2, -1.0, Point{}, Point{}, w) == doctest::Approx(ref).epsilon(1e-9));
    }
    SUBCASE("smooth cells: midpoint rule, second order") {
        for (int N : {1, 2, 3}) {
            const auto P = FracParams::make(N, 0.3);
            const auto v = mixed(P);
            Point c{};
            c[0] = 4.0;
            double prev = INFINITY;
            for (double w : {0.2, 0.1, 0.05}) {
                const double ref = cube_average(N, c, w, [&](const Point& x) { return evaluate(v, x); });
                const double err = std::abs(cell_average(v, c, w) - ref);
                CHECK(err <= 0.3 * w * w * std::abs(ref));
                if (std::isfinite(prev)) CHECK(err < 0.3 * prev);
                prev = err;
            }
        }
    }
    SUBCASE("truncated pole cut by the ball boundary") {
        const auto P = FracParams::make(1, 0.25);
        const auto v = ThetaPotential::make(P, {Pole{Point{}, 1.0, 0.3}});
        const double w = 0.2, e = 1.0 - 2.0 * P.s;
        // Cell [0.2, 0.4]: only [0.2, 0.3) lies inside the ball.
        const double ref = (std::pow(0.3, e) - std::pow(0.2, e)) / e / w;
        CHECK(cell_average(v, Point{0.3}, w) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("shrunk overlapping poles stay finite at their centres") {
    const auto P = FracParams::make(2, 0.5);
    Point b{};
    b[0] = 1.5;
    b[1] = -1.0;
    const auto v = ThetaPotential::make(P, {Pole{Point{}, 0.4 * P.gamma_hardy, 1.0}, Pole{b, 0.2, 1.0}});
    REQUIRE(v.remainder.kind() == Remainder::Kind::Composite);
    CHECK(std::isfinite(v.remainder(Point{})));
    CHECK(std::isfinite(v.remainder(b)));
    // Away from the centres the split leaves the total unchanged.
    Point x{};
    x[0] = 0.7;
    x[1] = -0.2;
    auto ind = [](double d) { return d < 1.0 ? 1.0 : 0.0; };
    for (double y : {-0.2, -0.6, -0.9}) {
        x[1] = y;
        const double direct = 0.4 * P.gamma_hardy * ind(norm(x)) / norm(x) + 0.2 * ind(distance(x, b)) / distance(x, b);
        CHECK(evaluate(v, x) == doctest::Approx(direct).epsilon(1e-12));
    }
}
