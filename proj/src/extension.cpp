#include "frachardy/extension.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "frachardy/error.hpp"
#include "frachardy/kernels.hpp"
#include "frachardy/quadrature.hpp"

namespace frachardy::extension {

TGrid TGrid::make(double t_max, int m_t, double s, double grading) {
    if (!(t_max > 0.0)) throw DomainError("t_max must be positive");
    if (m_t < 32) throw DomainError("m_t must be at least 32");
    if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0, 1)");
    TGrid g;
    g.t_max = t_max;
    g.m_t = m_t;
    g.s = s;
    g.grading = grading > 0.0 ? grading : std::clamp(1.5 / s, 2.0, 8.0);
    g.t.resize(m_t + 1);
    for (int j = 0; j <= m_t; ++j) {
        g.t[j] = t_max * std::pow(static_cast<double>(j) / m_t, g.grading);
    }
    g.t[m_t] = t_max;
    return g;
}

TMatrices t_matrices(const TGrid& tg) {
    const std::size_t n = tg.t.size();
    const double p = 1.0 - 2.0 * tg.s;
    TMatrices m;
    m.k_diag.assign(n, 0.0);
    m.m_diag.assign(n, 0.0);
    m.k_off.assign(n - 1, 0.0);
    m.m_off.assign(n - 1, 0.0);
    for (std::size_t e = 0; e + 1 < n; ++e) {
        const double a = tg.t[e], b = tg.t[e + 1], h = b - a;
        const auto w = quad::power_weight_element(a, b, p);
        const double k = w.length / (h * h);
        m.k_diag[e] += k;
        m.k_diag[e + 1] += k;
        m.k_off[e] -= k;
        m.m_diag[e] += w.maa;
        m.m_diag[e + 1] += w.mbb;
        m.m_off[e] += w.mab;
    }
    return m;
}

namespace {

ModeProfile solve_with(const TMatrices& tm, double xi) {
    const std::size_t n = tm.k_diag.size();
    const double x2 = xi * xi;
    // Interior unknowns 1 .. n-2; node 0 carries the trace, node n-1 is clamped.
    const std::size_t ni = n - 2;
    std::vector<double> sub(ni - 1), diag(ni), sup(ni - 1), rhs(ni, 0.0);
    for (std::size_t i = 0; i < ni; ++i) diag[i] = tm.k_diag[i + 1] + x2 * tm.m_diag[i + 1];
    for (std::size_t i = 0; i + 1 < ni; ++i) {
        sub[i] = sup[i] = tm.k_off[i + 1] + x2 * tm.m_off[i + 1];
    }
    const double a01 = tm.k_off[0] + x2 * tm.m_off[0];
    rhs[0] = -a01;
    quad::solve_tridiagonal(sub, diag, sup, rhs);
    ModeProfile prof;
    prof.values.assign(n, 0.0);
    prof.values[0] = 1.0;
    std::copy(rhs.begin(), rhs.end(), prof.values.begin() + 1);
    prof.energy = tm.k_diag[0] + x2 * tm.m_diag[0] + a01 * prof.values[1];
    return prof;
}

// Profiles for every stored coefficient, shared between coefficients of equal |xi|.
struct ProfileTable {
    std::vector<ModeProfile> profiles;
    std::vector<std::size_t> index;  // per stored coefficient
};

ProfileTable profile_table(const SpectralGrid& grid, const TGrid& tg) {
    const auto tm = t_matrices(tg);
    const auto freq = grid.frequency_norm();
    ProfileTable tab;
    tab.index.resize(freq.size());
    std::map<double, std::size_t> seen;
    for (std::size_t k = 0; k < freq.size(); ++k) {
        auto [it, fresh] = seen.try_emplace(freq[k], tab.profiles.size());
        if (fresh) {
            // Constants extend as constants: no energy and no flux.
            tab.profiles.push_back(freq[k] == 0.0
                                       ? ModeProfile{std::vector<double>(tg.t.size(), 1.0), 0.0}
                                       : solve_with(tm, freq[k]));
        }
        tab.index[k] = it->second;
    }
    return tab;
}

// Row-wise spectra (interleaved complex) of a field.
std::vector<std::vector<double>> row_spectra(const ExtensionField& u) {
    std::vector<std::vector<double>> out(u.rows());
    for (std::size_t j = 0; j < u.rows(); ++j) {
        out[j].resize(2 * u.xgrid.spectrum_size());
        u.xgrid.forward(u.row(j), out[j]);
    }
    return out;
}

// -Laplacian of a grid function, spectrally.
std::vector<double> neg_laplacian(const SpectralGrid& g, std::span<const double> f) {
    std::vector<double> spec(2 * g.spectrum_size());
    g.forward(f, spec);
    std::vector<double> xi2(g.spectrum_size());
    const auto fr = g.frequency_norm();
    for (std::size_t k = 0; k < xi2.size(); ++k) xi2[k] = fr[k] * fr[k];
    kernels::scale_complex(spec, xi2);
    std::vector<double> out(g.size());
    g.inverse(spec, out);
    return out;
}

// Rows of K_t U + M_t (-Laplacian U) per node (without the h^N factor).
std::vector<std::vector<double>> weak_operator_rows(const ExtensionField& u, std::size_t rows) {
    const auto tm = t_matrices(u.tgrid);
    const std::size_t n = u.xgrid.size(), R = u.rows();
    std::vector<std::vector<double>> lap(R);
    for (std::size_t j = 0; j < R; ++j) lap[j] = neg_laplacian(u.xgrid, u.row(j));
    std::vector<std::vector<double>> out(rows, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < rows; ++j) {
        auto& o = out[j];
        kernels::axpy(tm.k_diag[j], u.row(j), o);
        kernels::axpy(tm.m_diag[j], lap[j], o);
        if (j > 0) {
            kernels::axpy(tm.k_off[j - 1], u.row(j - 1), o);
            kernels::axpy(tm.m_off[j - 1], lap[j - 1], o);
        }
        if (j + 1 < R) {
            kernels::axpy(tm.k_off[j], u.row(j + 1), o);
            kernels::axpy(tm.m_off[j], lap[j + 1], o);
        }
    }
    return out;
}

}  // namespace

ModeProfile solve_mode_profile(double xi, const TGrid& tg) { return solve_with(t_matrices(tg), xi); }

std::span<const double> ExtensionField::row(std::size_t j) const {
    return std::span<const double>(values).subspan(j * xgrid.size(), xgrid.size());
}

std::span<double> ExtensionField::row(std::size_t j) {
    return std::span<double>(values).subspan(j * xgrid.size(), xgrid.size());
}

DiscreteField ExtensionField::trace() const {
    auto r = row(0);
    return DiscreteField{xgrid, std::vector<double>(r.begin(), r.end())};
}

ExtensionField extend(const DiscreteField& u, const TGrid& tg) {
    const auto& g = u.grid;
    ExtensionField out{g, tg, std::vector<double>(tg.t.size() * g.size(), 0.0), {}};
    if (tg.t_max * g.min_frequency() < 5.0) {
        out.warnings.push_back(fmt::format(
            "t_max * min|xi| = {:.3g} < 5: decay of the lowest modes is not resolved",
            tg.t_max * g.min_frequency()));
    }
    const auto tab = profile_table(g, tg);
    std::vector<double> spec(2 * g.spectrum_size()), row_spec(spec.size());
    g.forward(u.values, spec);
    for (std::size_t j = 0; j < tg.t.size(); ++j) {
        for (std::size_t k = 0; k < g.spectrum_size(); ++k) {
            const double p = tab.profiles[tab.index[k]].values[j];
            row_spec[2 * k] = p * spec[2 * k];
            row_spec[2 * k + 1] = p * spec[2 * k + 1];
        }
        g.inverse(row_spec, out.row(j));
    }
    return out;
}

double energy(const ExtensionField& u) {
    const auto& g = u.xgrid;
    const auto tm = t_matrices(u.tgrid);
    const auto S = row_spectra(u);
    const auto fr = g.frequency_norm();
    const auto mult = g.multiplicity();
    double acc = 0.0;
    for (std::size_t k = 0; k < g.spectrum_size(); ++k) {
        const double x2 = fr[k] * fr[k];
        double e = 0.0;
        for (std::size_t j = 0; j < S.size(); ++j) {
            const double re = S[j][2 * k], im = S[j][2 * k + 1];
            e += (tm.k_diag[j] + x2 * tm.m_diag[j]) * (re * re + im * im);
            if (j + 1 < S.size()) {
                const double re2 = S[j + 1][2 * k], im2 = S[j + 1][2 * k + 1];
                e += 2.0 * (tm.k_off[j] + x2 * tm.m_off[j]) * (re * re2 + im * im2);
            }
        }
        acc += mult[k] * e;
    }
    return acc * g.cell_volume() / static_cast<double>(g.size());
}

std::vector<double> extension_multiplier(const SpectralGrid& grid, const TGrid& tg) {
    const auto tab = profile_table(grid, tg);
    std::vector<double> out(grid.spectrum_size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = tab.profiles[tab.index[k]].energy;
    return out;
}

rayleigh::MuResult mu_extended(const ThetaPotential& v, const SpectralGrid& xgrid, const TGrid& tg,
                               const rayleigh::MuOptions& opts) {
    auto m = extension_multiplier(xgrid, tg);
    const double ks = xgrid.params().kappa_s;
    for (double& x : m) x /= ks;
    return rayleigh::mu_with_multiplier(cell_averages(v, xgrid), xgrid, m, opts);
}

std::vector<double> neumann_flux(const ExtensionField& u) {
    return weak_operator_rows(u, 1).front();
}

namespace {

struct TestFamily {
    std::vector<std::vector<double>> t_hats;  // per coarse t index: weights over rows
    std::vector<std::vector<double>> x_hats;  // per coarse index along one axis: weights over n
};

TestFamily make_tests(std::size_t rows, int n, int basis) {
    TestFamily f;
    const int bt = std::max(2, std::min<int>(basis, static_cast<int>(rows)));
    const double dt = static_cast<double>(rows - 1) / (bt - 1);
    for (int q = 0; q < bt; ++q) {
        std::vector<double> w(rows, 0.0);
        for (std::size_t j = 0; j < rows; ++j) {
            w[j] = std::max(0.0, 1.0 - std::abs(static_cast<double>(j) - q * dt) / dt);
        }
        f.t_hats.push_back(std::move(w));
    }
    const int bx = std::max(1, std::min(basis, n));
    const double dx = static_cast<double>(n) / bx;
    for (int q = 0; q < bx; ++q) {
        std::vector<double> w(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double d = std::abs(i - q * dx);
            d = std::min(d, n - d);  // periodic
            w[i] = std::max(0.0, 1.0 - d / dx);
        }
        f.x_hats.push_back(std::move(w));
    }
    return f;
}

// Contracts a grid field with the tensor x-hats; returns one value per x test.
std::vector<double> contract_x(const SpectralGrid& g, const TestFamily& f, std::span<const double> field) {
    const int N = g.dim(), n = g.n();
    const std::size_t bx = f.x_hats.size();
    std::size_t tests = 1;
    for (int k = 0; k < N; ++k) tests *= bx;
    std::vector<double> out(tests, 0.0);
    // Successive contraction over the last axis keeps this O(size * bx).
    std::vector<double> cur(field.begin(), field.end());
    std::size_t outer = g.size() / static_cast<std::size_t>(n);
    std::size_t done = 1;  // contracted axes already moved to the front as test indices
    for (int axis = 0; axis < N; ++axis) {
        std::vector<double> next(done * bx * outer, 0.0);
        for (std::size_t d = 0; d < done; ++d) {
            for (std::size_t o = 0; o < outer; ++o) {
                const double* src = cur.data() + (d * outer + o) * n;
                for (std::size_t q = 0; q < bx; ++q) {
                    next[(d * bx + q) * outer + o] = kernels::dot(
                        std::span<const double>(src, n), f.x_hats[q]);
                }
            }
        }
        cur = std::move(next);
        done *= bx;
        outer /= static_cast<std::size_t>(n);
        if (outer == 0) outer = 1;
    }
    std::copy(cur.begin(), cur.begin() + static_cast<std::ptrdiff_t>(tests), out.begin());
    return out;
}

struct Affine {
    std::vector<double> a, b, scale;  // test value = a - eps b, magnitude scale
    std::size_t bx_tests = 0;
};

Affine affine_tests(const Certificate& c, int basis) {
    const auto& u = c.phi;
    const auto& g = u.xgrid;
    const std::size_t n = g.size();
    if (c.v.size() != n || c.v_tilde.size() != n) {
        throw PreconditionError("potential tables do not match the trace grid");
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double tol = 1e-12 * std::max(1.0, std::abs(c.v[i]));
        if (c.v_tilde[i] < c.v[i] - tol || c.v_tilde[i] > std::abs(c.v[i]) + tol) {
            throw PreconditionError(fmt::format("v_tilde out of [V, |V|] at node {}", i));
        }
    }
    const double h = g.spacing();
    const std::size_t rows = u.rows() - 1;  // t_max row excluded
    for (std::size_t i = 0; i < n; ++i) {
        const Point x = g.coordinate(i);
        bool near_pole = false;
        for (const auto& a : c.pole_centers) near_pole = near_pole || distance(x, a) <= 1.0001 * h;
        if (near_pole) continue;
        for (std::size_t j = 0; j < rows; ++j) {
            if (!(u.values[j * n + i] > 0.0)) {
                throw PreconditionError(fmt::format(
                    "certificate field is not positive at t row {}, x node {}", j, i));
            }
        }
    }

    const auto W = weak_operator_rows(u, rows);
    const double ks = g.params().kappa_s;
    const auto phi0 = u.row(0);
    const auto tm = t_matrices(u.tgrid);

    std::vector<double> r0(n), b0(n), mag0(n);
    for (std::size_t i = 0; i < n; ++i) {
        r0[i] = W[0][i] - ks * c.v[i] * phi0[i];
        b0[i] = ks * c.v_tilde[i] * phi0[i];
    }
    const auto fam = make_tests(rows, g.n(), basis);
    Affine out;
    // Magnitude of the terms entering each test value, for the relative slack.
    for (std::size_t qt = 0; qt < fam.t_hats.size(); ++qt) {
        std::vector<double> fa(n, 0.0), fb(n, 0.0), fm(n, 0.0);
        const auto& wt = fam.t_hats[qt];
        for (std::size_t j = 0; j < rows; ++j) {
            if (wt[j] == 0.0) continue;
            const auto& src = j == 0 ? r0 : W[j];
            kernels::axpy(wt[j], src, fa);
            for (std::size_t i = 0; i < n; ++i) {
                fm[i] += wt[j] * (std::abs(W[j][i]) + (tm.k_diag[j] + tm.m_diag[j]) *
                                                           std::abs(u.values[j * n + i]));
            }
            if (j == 0) {
                kernels::axpy(wt[0], b0, fb);
                for (std::size_t i = 0; i < n; ++i) fm[i] += wt[0] * ks * std::abs(c.v[i] * phi0[i]);
            }
        }
        const auto ta = contract_x(g, fam, fa);
        const auto tb = contract_x(g, fam, fb);
        const auto tmag = contract_x(g, fam, fm);
        out.a.insert(out.a.end(), ta.begin(), ta.end());
        out.b.insert(out.b.end(), tb.begin(), tb.end());
        out.scale.insert(out.scale.end(), tmag.begin(), tmag.end());
        out.bx_tests = ta.size();
    }
    return out;
}

}  // namespace

CertificateVerdict certificate_check(const Certificate& cert, int basis) {
    const auto aff = affine_tests(cert, basis);
    CertificateVerdict v;
    v.epsilon = cert.epsilon;
    v.tests = aff.a.size();
    v.pass = true;
    v.worst_margin = INFINITY;
    for (std::size_t q = 0; q < aff.a.size(); ++q) {
        const double slack = 1e-8 * aff.scale[q];
        const double val = aff.a[q] - cert.epsilon * aff.b[q];
        const double margin = val + slack;
        if (margin < v.worst_margin) {
            v.worst_margin = margin;
            v.worst_t = static_cast<int>(q / aff.bx_tests);
            v.worst_x = static_cast<int>(q % aff.bx_tests);
            v.slack = slack;
        }
        if (margin < 0.0) v.pass = false;
    }
    v.bound = v.pass ? cert.epsilon / (1.0 + cert.epsilon) : 0.0;
    return v;
}

double certificate_max_epsilon(const Certificate& cert, int basis) {
    const auto aff = affine_tests(cert, basis);
    double eps = INFINITY;
    for (std::size_t q = 0; q < aff.a.size(); ++q) {
        const double slack = 1e-8 * aff.scale[q];
        const double a = aff.a[q] + slack;
        if (aff.b[q] > 0.0) {
            eps = std::min(eps, a / aff.b[q]);
        } else if (a < 0.0) {
            return -1.0;
        }
    }
    // Step inside the closed-form boundary so rounding cannot flip the verdict.
    return std::isfinite(eps) ? eps * (1.0 - 1e-12) : eps;
}

ExtensionField build_upsilon(double alpha, const SpectralGrid& xgrid, const TGrid& tg) {
    const auto& P = xgrid.params();
    const double c = P.half_gap();
    if (!(alpha > 0.0 && alpha < c)) throw DomainError("alpha must lie in (0, (N-2s)/2)");
    const double e = -c + alpha;
    const double h = xgrid.spacing();
    auto u = DiscreteField::sample(xgrid, [&](const Point& x) {
        const double r = norm(x);
        return r < 0.5 * h ? radial_power_cell_average(P.N, e, Point{}, x, h) : std::pow(r, e);
    });
    // Pole cell against its neighbour along the first axis.
    const double v0 = radial_power_cell_average(P.N, e, Point{}, Point{}, h), v1 = std::pow(h, e);
    if (std::max(v0, v1) > 10.0 * std::min(v0, v1)) {
        throw ResolutionError("trace profile varies more than 10x next to the pole");
    }
    return extend(u, tg);
}

}  // namespace frachardy::extension
