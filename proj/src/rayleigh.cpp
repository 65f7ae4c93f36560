#include "frachardy/rayleigh.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include "frachardy/error.hpp"
#include "frachardy/kernels.hpp"
#include "frachardy/lanczos.hpp"
#include "frachardy/parallel.hpp"

namespace frachardy::rayleigh {

namespace {

std::vector<double> energy_weights(const SpectralGrid& g) {
    std::vector<double> w(g.spectrum_size());
    kernels::multiply(g.multiplier(), g.multiplicity(), w);
    return w;
}

void check_box(const ThetaPotential& v, const SpectralGrid& grid) {
    const double L = grid.half_width(), h = grid.spacing();
    for (const auto& p : v.poles) {
        const double margin = 2.0 * h + (std::isinf(p.r) ? 0.0 : p.r);
        for (int k = 0; k < grid.dim(); ++k) {
            if (p.a[k] < -L + margin || p.a[k] > L - margin) {
                throw GeometryError(fmt::format(
                    "pole at coordinate {:.6g} leaves the box interior (L = {:.6g})", p.a[k], L));
            }
        }
    }
}

double lp_sum(std::span<const double> u, double p) {
    double acc = 0.0;
    for (double v : u) acc += std::pow(std::abs(v), p);
    return acc;
}

}  // namespace

double dsnorm_sq(const DiscreteField& u) {
    const auto& g = u.grid;
    std::vector<double> spec(2 * g.spectrum_size());
    g.forward(u.values, spec);
    const auto w = energy_weights(g);
    return kernels::weighted_complex_energy(w, spec) * g.cell_volume() /
           static_cast<double>(g.size());
}

double potential_energy(const DiscreteField& u, std::span<const double> vbar) {
    return kernels::weighted_sq_sum(vbar, u.values) * u.grid.cell_volume();
}

double potential_energy(const DiscreteField& u, const ThetaPotential& v) {
    return potential_energy(u, cell_averages(v, u.grid));
}

double quadform(const DiscreteField& u, const ThetaPotential& v) {
    return dsnorm_sq(u) - potential_energy(u, v);
}

MuResult mu_from_cells(std::span<const double> vbar, const SpectralGrid& grid,
                       const MuOptions& opts) {
    return mu_with_multiplier(vbar, grid, grid.multiplier(), opts);
}

MuResult mu_with_multiplier(std::span<const double> vbar, const SpectralGrid& grid,
                            std::span<const double> multiplier, const MuOptions& opts) {
    MuResult res;
    res.minimizer = DiscreteField::zeros(grid);
    res.bias_note =
        "discrete infimum over a finite subspace: over-estimates the continuum mu up to "
        "potential quadrature error";
    if (std::all_of(vbar.begin(), vbar.end(), [](double x) { return x == 0.0; })) {
        res.mu = 1.0;
        res.lambda_max = 0.0;
        return res;
    }
    const std::size_t n = grid.size();
    std::vector<double> isq(multiplier.size());
    for (std::size_t k = 1; k < isq.size(); ++k) {
        isq[k] = multiplier[k] > 0.0 ? 1.0 / std::sqrt(multiplier[k]) : 0.0;
    }
    std::vector<double> vb(vbar.begin(), vbar.end());

    auto apply_inv_sqrt = [&grid, &isq](std::span<const double> x, std::span<double> y) {
        std::vector<double> spec(2 * grid.spectrum_size());
        grid.forward(x, spec);
        kernels::scale_complex(spec, isq);
        grid.inverse(spec, y);
    };
    lanczos::Operator op = [&](std::span<const double> x, std::span<double> y) {
        std::vector<double> tmp(n);
        apply_inv_sqrt(x, tmp);
        kernels::multiply(tmp, vb, tmp);
        apply_inv_sqrt(tmp, y);
    };

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal;
    std::vector<double> start(n);
    for (double& x : start) x = normal(rng);
    DiscreteField s0{grid, std::move(start)};
    s0.project_mean_zero();

    lanczos::Options lo;
    lo.tol = opts.tol;
    lo.max_matvecs = opts.max_matvecs;
    const auto lr = lanczos::largest(op, std::move(s0.values), lo);
    res.lambda_max = lr.value;
    res.mu = 1.0 - lr.value;
    res.iterations = lr.matvecs;
    res.residual = lr.residual;
    apply_inv_sqrt(lr.vector, res.minimizer.values);
    const double nrm = std::sqrt(res.minimizer.l2_norm_sq());
    if (nrm > 0.0) kernels::scale(res.minimizer.values, 1.0 / nrm);
    return res;
}

MuResult mu(const ThetaPotential& v, const SpectralGrid& grid, const MuOptions& opts) {
    check_box(v, grid);
    return mu_from_cells(cell_averages(v, grid), grid, opts);
}

SweepResult binding_sweep(const ThetaPotential& v1, const ThetaPotential& v2, const Point& direction,
                          std::vector<double> radii, const SpectralGrid& grid, int workers,
                          const MuOptions& opts) {
    const double dn = norm(direction);
    if (!(dn > 0.0)) throw DomainError("sweep direction must be nonzero");
    const Point e = (1.0 / dn) * direction;
    std::sort(radii.begin(), radii.end());

    // Assemble every configuration first so geometry errors surface before any solve.
    std::vector<ThetaPotential> configs;
    configs.reserve(radii.size());
    for (double rho : radii) {
        auto v = add(v1, translate(v2, rho * e));
        check_box(v, grid);
        configs.push_back(std::move(v));
    }

    SweepResult out;
    std::vector<double> singles(2);
    parallel_for(2, workers, [&](std::size_t i) {
        const auto& v = i == 0 ? v1 : v2;
        singles[i] = v.poles.empty() && v.lambda_inf == 0.0 && v.remainder.terms.empty()
                         ? 1.0
                         : mu(v, grid, opts).mu;
    });
    out.mu_v1 = singles[0];
    out.mu_v2 = singles[1];
    if (out.mu_v1 <= 0.0) out.warnings.push_back("mu(V1) <= 0: hypothesis of the sweep violated");
    if (out.mu_v2 <= 0.0) out.warnings.push_back("mu(V2) <= 0: hypothesis of the sweep violated");
    if (v1.lambda_inf + v2.lambda_inf >= grid.params().gamma_hardy) {
        out.warnings.push_back("exterior masses sum to at least gamma_H");
    }

    out.rows.resize(radii.size());
    parallel_for(radii.size(), workers, [&](std::size_t i) {
        const auto r = mu(configs[i], grid, opts);
        out.rows[i] = {radii[i], r.mu, r.iterations, r.residual};
    });
    return out;
}

Profile hardy_profile(const FracParams& params, double eta, double support) {
    const double e = -0.25 * (params.N - 2.0 * params.s);
    const double edge = std::pow(support * support + eta * eta, e);
    return {[=](const Point& x) {
                const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                if (r2 >= support * support) return 0.0;
                return std::pow(r2 + eta * eta, e) - edge;
            },
            support, fmt::format("hardy(eta={:g})", eta)};
}

std::vector<ProbeRow> scaled_family_probe(const ThetaPotential& v, const Profile& base,
                                          const std::vector<double>& rhos, const Point& center,
                                          const SpectralGrid& grid) {
    const double L = grid.half_width();
    for (double rho : rhos) {
        if (!(rho > 0.0)) throw DomainError("probe scales must be positive");
        for (int k = 0; k < grid.dim(); ++k) {
            if (std::abs(center[k]) + rho * base.support > L) {
                throw GeometryError(
                    fmt::format("scaled support rho = {:g} does not fit in the box", rho));
            }
        }
    }
    check_box(v, grid);
    const auto vbar = cell_averages(v, grid);
    const double ex = -0.5 * (grid.dim() - 2.0 * grid.params().s);
    std::vector<ProbeRow> rows;
    for (double rho : rhos) {
        const double amp = std::pow(rho, ex);
        auto u = DiscreteField::sample(grid, [&](const Point& x) {
            return amp * base.f((1.0 / rho) * (x - center));
        });
        u.project_mean_zero();
        const double d = dsnorm_sq(u);
        rows.push_back({rho, (d - potential_energy(u, vbar)) / d});
    }
    return rows;
}

std::string to_string(ConfigurationReport::Status status) {
    switch (status) {
        case ConfigurationReport::Status::Found: return "found";
        case ConfigurationReport::Status::Impossible: return "impossible";
        case ConfigurationReport::Status::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

namespace {

ThetaPotential full_poles(const FracParams& params, const std::vector<double>& masses,
                          const std::vector<Point>& pos) {
    std::vector<Pole> poles;
    for (std::size_t i = 0; i < pos.size(); ++i) poles.push_back({pos[i], masses[i], kFullRadius});
    return ThetaPotential::make(params, std::move(poles));
}

Point random_direction(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Point d{};
    double n2 = 0.0;
    while (n2 < 1e-12) {
        n2 = 0.0;
        for (int k = 0; k < dim; ++k) {
            d[k] = normal(rng);
            n2 += d[k] * d[k];
        }
    }
    return (1.0 / std::sqrt(n2)) * d;
}

}  // namespace

ConfigurationReport find_positive_configuration(std::vector<double> masses, const SpectralGrid& grid,
                                                std::uint64_t seed, double margin, int workers,
                                                const MuOptions& opts) {
    ConfigurationReport rep;
    const auto& params = grid.params();
    const double gh = params.gamma_hardy;
    std::sort(masses.begin(), masses.end());
    rep.masses = masses;
    if (masses.empty()) {
        rep.status = ConfigurationReport::Status::Found;
        rep.mu = 1.0;
        return rep;
    }
    const double h = grid.spacing(), L = grid.half_width();
    double sum = 0.0;
    for (double m : masses) sum += m;

    const auto largest = std::max_element(masses.begin(), masses.end());
    if (*largest >= gh || sum >= gh) {
        rep.status = ConfigurationReport::Status::Impossible;
        // Witness: the poles clustered at spacing 4h, probed at the violating scale.
        std::vector<Point> pos;
        for (std::size_t i = 0; i < masses.size(); ++i) {
            Point p{};
            p[0] = 4.0 * h * (static_cast<double>(i) - 0.5 * (masses.size() - 1));
            pos.push_back(p);
        }
        const auto v = full_poles(params, masses, pos);
        rep.positions = pos;
        const auto base = hardy_profile(params, 1.0 / 32.0, 1.0);
        std::vector<double> rhos;
        Point center{};
        if (*largest >= gh) {
            rep.reason = fmt::format("mass {:.6g} >= gamma_H = {:.6g}", *largest, gh);
            center = pos[static_cast<std::size_t>(largest - masses.begin())];
            for (double f : {1.0, 2.0, 4.0, 8.0}) rhos.push_back(f * 64.0 * h);
        } else {
            rep.reason = fmt::format("sum of masses {:.6g} >= gamma_H = {:.6g}", sum, gh);
            for (double f : {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0}) rhos.push_back(f * 0.5 * L);
        }
        rep.witness = scaled_family_probe(v, base, rhos, center, grid);
        return rep;
    }

    std::mt19937_64 rng(seed);
    rep.positions.push_back(Point{});
    rep.status = ConfigurationReport::Status::Found;
    {
        const auto r = mu(full_poles(params, {masses[0]}, rep.positions), grid, opts);
        rep.mu = r.mu;
        rep.mu_history.push_back(r.mu);
    }
    const double start = 8.0 * h;
    for (std::size_t i = 1; i < masses.size(); ++i) {
        const Point dir = random_direction(grid.dim(), rng);
        std::vector<double> seps;
        for (double sep = start; sep <= 0.25 * L; sep *= 2.0) seps.push_back(sep);
        std::vector<double> mus(seps.size(), -INFINITY);
        std::vector<char> admissible(seps.size(), 1);
        for (std::size_t c = 0; c < seps.size(); ++c) {
            const Point cand = seps[c] * dir;
            for (const auto& q : rep.positions) {
                if (distance(q, cand) < 2.0 * h) admissible[c] = 0;
            }
        }
        auto masses_i = std::vector<double>(masses.begin(), masses.begin() + i + 1);
        auto eval = [&](std::size_t c) {
            if (!admissible[c]) return;
            auto pos = rep.positions;
            pos.push_back(seps[c] * dir);
            mus[c] = mu(full_poles(params, masses_i, pos), grid, opts).mu;
        };
        std::size_t chosen = seps.size();
        if (workers > 1) {
            parallel_for(seps.size(), workers, eval);
            for (std::size_t c = 0; c < seps.size() && chosen == seps.size(); ++c) {
                if (mus[c] >= margin) chosen = c;
            }
        } else {
            for (std::size_t c = 0; c < seps.size(); ++c) {
                eval(c);
                if (mus[c] >= margin) {
                    chosen = c;
                    break;
                }
            }
        }
        if (chosen == seps.size()) {
            const auto best = std::max_element(mus.begin(), mus.end());
            rep.status = ConfigurationReport::Status::Inconclusive;
            rep.reason = fmt::format("no separation up to L/4 reached mu >= {:g} for pole {}",
                                     margin, i + 1);
            if (best != mus.end() && std::isfinite(*best)) {
                rep.positions.push_back(seps[static_cast<std::size_t>(best - mus.begin())] * dir);
                rep.mu = *best;
                rep.mu_history.push_back(*best);
            }
            return rep;
        }
        rep.positions.push_back(seps[chosen] * dir);
        rep.mu = mus[chosen];
        rep.mu_history.push_back(mus[chosen]);
    }
    rep.reason = "all poles placed";
    return rep;
}

double lebesgue_norm(std::span<const double> values, const SpectralGrid& grid, double p) {
    return std::pow(lp_sum(values, p) * grid.cell_volume(), 1.0 / p);
}

double sobolev_constant(const SpectralGrid& grid) {
    const auto& params = grid.params();
    const double p = params.sobolev_exponent();
    const double ex = -0.5 * (params.N - 2.0 * params.s);
    auto quotient = [&](double log_eps) {
        const double e2 = std::exp(2.0 * log_eps);
        auto u = DiscreteField::sample(grid, [&](const Point& x) {
            return std::pow(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + e2, ex);
        });
        u.project_mean_zero();
        const double lp = lebesgue_norm(u.values, grid, p);
        return dsnorm_sq(u) / (lp * lp);
    };
    const double lo = std::log(2.0 * grid.spacing()), hi = std::log(0.25 * grid.half_width());
    const auto r = boost::math::tools::brent_find_minima(quotient, lo, hi, 30);
    return r.second;
}

double mass_fraction_near_poles(const DiscreteField& u, const ThetaPotential& v, double radius) {
    double near = 0.0, total = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        const double w = u.values[i] * u.values[i];
        total += w;
        const Point x = u.grid.coordinate(i);
        for (const auto& p : v.poles) {
            if (distance(x, p.a) <= radius) {
                near += w;
                break;
            }
        }
    }
    return total > 0.0 ? near / total : 0.0;
}

}  // namespace frachardy::rayleigh
