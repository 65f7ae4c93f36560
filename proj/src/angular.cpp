#include "frachardy/angular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "frachardy/error.hpp"
#include "frachardy/quadrature.hpp"

namespace frachardy::angular {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

double sphere_area(int dim) {
    // |S^{dim}| = 2 pi^{(dim+1)/2} / Gamma((dim+1)/2)
    return 2.0 * std::pow(std::numbers::pi, 0.5 * (dim + 1)) / gamma_fn(0.5 * (dim + 1));
}

// Negative pivots of LDL^T of (K - mu M) = eigenvalues below mu.
int sturm_count(const Pencil& p, double mu) {
    const std::size_t n = p.size();
    int count = 0;
    double q = p.k_diag[0] - mu * p.m_diag[0];
    for (std::size_t i = 0;; ++i) {
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
        if (i + 1 == n) break;
        const double e = p.k_off[i] - mu * p.m_off[i];
        q = (p.k_diag[i + 1] - mu * p.m_diag[i + 1]) - e * e / q;
    }
    return count;
}

std::vector<double> apply_mass(const Pencil& p, const std::vector<double>& x) {
    const std::size_t n = p.size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = p.m_diag[i] * x[i];
        if (i > 0) v += p.m_off[i - 1] * x[i - 1];
        if (i + 1 < n) v += p.m_off[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

std::vector<double> inverse_iteration(const Pencil& p, double mu,
                                      const std::vector<std::vector<double>>& previous) {
    const std::size_t n = p.size();
    std::vector<double> diag(n), off(n - 1), x(n);
    // A relative nudge keeps the shifted matrix nonsingular in floating point;
    // an exactly zero pivot (it happens) gets a larger one.
    for (double nudge = 1e-13;; nudge *= 10.0) {
        const double shift = mu - nudge * std::max(1.0, std::abs(mu));
        for (std::size_t i = 0; i < n; ++i) diag[i] = p.k_diag[i] - shift * p.m_diag[i];
        for (std::size_t i = 0; i + 1 < n; ++i) off[i] = p.k_off[i] - shift * p.m_off[i];
        for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * std::sin(0.37 * static_cast<double>(i));
        try {
            for (int it = 0; it < 4; ++it) {
                std::vector<double> rhs = apply_mass(p, x);
                quad::solve_tridiagonal(off, diag, off, rhs);
                x = std::move(rhs);
                for (const auto& v : previous) {
                    const double c = p.m_inner(x, v);
                    for (std::size_t i = 0; i < n; ++i) x[i] -= c * v[i];
                }
                const double norm = std::sqrt(p.m_inner(x, x));
                for (double& v : x) v /= norm;
            }
            break;
        } catch (const ResolutionError&) {
            if (nudge > 1e-8) throw;
        }
    }
    return x;
}

}  // namespace

AngularGrid AngularGrid::make(const FracParams& params, int m, double grading) {
    if (m < 64) throw DomainError("AngularGrid: need at least 64 interior nodes");
    if (!(grading >= 1.0)) throw DomainError("AngularGrid: grading exponent must be >= 1");
    AngularGrid g;
    g.params = params;
    g.m = m;
    g.grading = grading;
    g.phi.resize(m + 2);
    for (int j = 0; j <= m + 1; ++j) {
        g.phi[j] = kHalfPi * (1.0 - std::pow(1.0 - static_cast<double>(j) / (m + 1), grading));
    }
    g.phi[m + 1] = kHalfPi;
    return g;
}

double AngularGrid::weight(double phi_value) const {
    return std::pow(std::sin(phi_value), params.N - 1) *
           std::pow(std::cos(phi_value), 1.0 - 2.0 * params.s);
}

double Pencil::m_inner(const std::vector<double>& x, const std::vector<double>& y) const {
    const std::size_t n = size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += m_diag[i] * x[i] * y[i];
        if (i + 1 < n) acc += m_off[i] * (x[i] * y[i + 1] + x[i + 1] * y[i]);
    }
    return acc;
}

Pencil assemble(double lambda, const AngularGrid& grid) {
    const int n_nodes = grid.m + 2;
    const int N = grid.params.N;
    const double p = 1.0 - 2.0 * grid.params.s;
    Pencil pen;
    pen.k_diag.assign(n_nodes, 0.0);
    pen.m_diag.assign(n_nodes, 0.0);
    pen.k_off.assign(n_nodes - 1, 0.0);
    pen.m_off.assign(n_nodes - 1, 0.0);

    const quad::Rule& g = quad::gauss_legendre(24);
    const quad::Rule& g_end = quad::gauss_legendre(64);
    for (int e = 0; e + 1 < n_nodes; ++e) {
        const double a = grid.phi[e], b = grid.phi[e + 1], h = b - a;
        double kw = 0.0, maa = 0.0, mab = 0.0, mbb = 0.0;
        auto accumulate = [&](double ph, double w) {
            const double la = (b - ph) / h, lb = (ph - a) / h;
            kw += w;
            maa += w * la * la;
            mab += w * la * lb;
            mbb += w * lb * lb;
        };
        if (e + 2 == n_nodes) {
            // Element touching the equator; tau = pi/2 - phi, tau^p absorbed by
            // the substitution tau = h v^{1/(p+1)}.
            const double beta = 1.0 / (p + 1.0);
            const double scale = std::pow(h, p + 1.0) / (p + 1.0);
            for (std::size_t q = 0; q < g_end.nodes.size(); ++q) {
                const double v = 0.5 * (g_end.nodes[q] + 1.0);
                const double tau = h * std::pow(v, beta);
                const double sinc = tau > 0.0 ? std::sin(tau) / tau : 1.0;
                const double f = std::pow(sinc, p) * std::pow(std::cos(tau), N - 1);
                accumulate(kHalfPi - tau, scale * 0.5 * g_end.weights[q] * f);
            }
        } else {
            for (std::size_t q = 0; q < g.nodes.size(); ++q) {
                const double ph = a + 0.5 * h * (g.nodes[q] + 1.0);
                accumulate(ph, 0.5 * h * g.weights[q] * grid.weight(ph));
            }
        }
        const double k = kw / (h * h);
        pen.k_diag[e] += k;
        pen.k_diag[e + 1] += k;
        pen.k_off[e] -= k;
        pen.m_diag[e] += maa;
        pen.m_diag[e + 1] += mbb;
        pen.m_off[e] += mab;
    }
    pen.k_diag[n_nodes - 1] -= grid.params.kappa_s * lambda;
    return pen;
}

AngularEigenResult mu_k(double lambda, int k, const AngularGrid& grid) {
    const FracParams& par = grid.params;
    if (!(lambda < par.gamma_hardy)) throw DomainError("angular::mu_k: lambda must be < gamma_H");
    if (k < 1) throw DomainError("angular::mu_k: k must be >= 1");
    const Pencil pen = assemble(lambda, grid);
    if (static_cast<std::size_t>(k) > pen.size()) throw DomainError("angular::mu_k: k too large");

    double lo = -1.0;
    while (sturm_count(pen, lo) > 0) lo *= 2.0;
    double hi = 1.0;
    while (sturm_count(pen, hi) < k) hi *= 2.0;

    AngularEigenResult res;
    res.lambda = lambda;
    for (int i = 0; i < k; ++i) {
        double a = lo, b = hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            if (b - a <= 4e-16 * std::max(1.0, std::abs(mid))) break;
            if (sturm_count(pen, mid) > i) {
                b = mid;
            } else {
                a = mid;
            }
        }
        res.mu_values.push_back(0.5 * (a + b));
    }

    const double c = par.half_gap();
    if (!(res.mu_values.front() > -c * c)) {
        throw ResolutionError("angular::mu_k: discrete mu_1 violates the lower bound -((N-2s)/2)^2");
    }

    const double area = sphere_area(par.N - 1);
    for (int i = 0; i < k; ++i) {
        std::vector<double> v = inverse_iteration(pen, res.mu_values[i], res.vectors);
        res.vectors.push_back(std::move(v));
    }
    for (auto& v : res.vectors) {
        const double norm = std::sqrt(area);
        for (double& x : v) x /= norm;
    }
    res.psi1 = res.vectors.front();
    double sum = 0.0;
    for (double x : res.psi1) sum += x;
    if (sum < 0.0) {
        for (double& x : res.psi1) x = -x;
        for (double& x : res.vectors.front()) x = -x;
    }
    res.equator_value = res.psi1.back();
    return res;
}

Psi1Report psi1_properties(const AngularEigenResult& r) {
    Psi1Report rep;
    rep.min_value = *std::min_element(r.psi1.begin(), r.psi1.end());
    rep.positive = rep.min_value > 0.0;
    rep.equator_value = r.equator_value;
    if (r.mu_values.size() >= 2) {
        rep.gap = r.mu_values[1] - r.mu_values[0];
        rep.simple = rep.gap > 0.0;
    }
    return rep;
}

}  // namespace frachardy::angular
