#include "frachardy/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "frachardy/angular.hpp"
#include "frachardy/error.hpp"
#include "frachardy/extension.hpp"
#include "frachardy/grid.hpp"
#include "frachardy/parallel.hpp"
#include "frachardy/rayleigh.hpp"
#include "frachardy/specfun.hpp"
#include "frachardy/thresholds.hpp"

namespace frachardy::harness {

namespace th = thresholds;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string utc_now() {
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}",
                       std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

Verdict verdict(std::string name, bool pass, double value, double threshold, std::string detail) {
    return Verdict{std::move(name), pass, value, threshold, std::move(detail)};
}

SpectralGrid make_grid(const config::ExperimentConfig& c, int n = 0) {
    return SpectralGrid::make(c.params, n > 0 ? n : c.grid->n, c.grid->L);
}

extension::TGrid make_tgrid(const config::ExperimentConfig& c, const SpectralGrid& g) {
    const auto& t = *c.tgrid;
    const double t_max = t.t_max > 0.0 ? t.t_max : 10.0 / g.min_frequency();
    return extension::TGrid::make(t_max, t.m_t, c.params.s, t.grading);
}

rayleigh::MuOptions mu_options(const config::ExperimentConfig& c) {
    rayleigh::MuOptions o;
    o.tol = c.options["solver"]["tol"].get<double>();
    o.max_matvecs = c.options["solver"]["max_matvecs"].get<int>();
    o.seed = c.seed;
    return o;
}

bool is_zero(const ThetaPotential& v) {
    return v.poles.empty() && v.lambda_inf == 0.0 && v.remainder.kind() == Remainder::Kind::Zero;
}

bool is_single_full_pole(const ThetaPotential& v) {
    return v.poles.size() == 1 && std::isinf(v.poles[0].r) && v.lambda_inf == 0.0 &&
           v.remainder.kind() == Remainder::Kind::Zero && v.poles[0].lambda > 0.0 &&
           v.poles[0].lambda < v.params.gamma_hardy;
}

json point_json(const Point& p, int N) { return std::vector<double>(p.begin(), p.begin() + N); }

Point point_from(const json& j) {
    Point p{};
    const auto v = j.get<std::vector<double>>();
    std::copy(v.begin(), v.end(), p.begin());
    return p;
}

std::vector<int> ladder_of(const config::ExperimentConfig& c) {
    std::vector<int> out;
    for (double x : c.options["ladder"].get<std::vector<double>>()) out.push_back(static_cast<int>(x));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Aitken extrapolation of the last three levels of a ladder.
json ladder_trend(const std::vector<double>& mus) {
    json t = json::object();
    if (mus.size() < 3) return t;
    const double a = mus[mus.size() - 3], b = mus[mus.size() - 2], c = mus.back();
    const double d1 = b - a, d2 = c - b;
    t["ratio"] = d1 != 0.0 ? d2 / d1 : 0.0;
    if (d1 != d2) t["extrapolated"] = c - d2 * d2 / (d2 - d1);
    return t;
}

// ---------------------------------------------------------------------------

void run_mu(const config::ExperimentConfig& c, RunRecord& rec) {
    const auto t0 = Clock::now();
    const auto ladder = ladder_of(c);
    const auto opts = mu_options(c);
    const bool cross = c.options["cross_check"].get<bool>();
    rec.columns = {"potential", "n", "mu", "lambda_max", "iterations", "residual", "mu_extended"};
    rec.plot_x = "n";
    rec.plot_y = "mu";
    const auto& P = c.params;
    double worst_cross = 0.0, worst_residual = 0.0;
    json pots = json::array();
    for (std::size_t p = 0; p < c.potentials.size(); ++p) {
        const auto& V = c.potentials[p];
        std::vector<double> mus;
        for (int n : ladder) {
            const auto g = make_grid(c, n);
            const auto r = rayleigh::mu(V, g, opts);
            double ext = NAN;
            if (cross && n == ladder.back()) {
                ext = extension::mu_extended(V, g, make_tgrid(c, g), opts).mu;
                worst_cross = std::max(worst_cross, std::abs(ext - r.mu));
            }
            worst_residual = std::max(worst_residual, r.residual);
            mus.push_back(r.mu);
            rec.rows.push_back({static_cast<double>(p), static_cast<double>(n), r.mu, r.lambda_max,
                                static_cast<double>(r.iterations), r.residual, ext});
            if (n == ladder.back()) rec.diagnostics["bias_note"] = r.bias_note;
        }
        json d = {{"index", p}, {"trend", ladder_trend(mus)}};
        if (is_zero(V)) {
            const double err = std::abs(mus.back() - 1.0);
            rec.verdicts.push_back(verdict(fmt::format("zero_potential[{}]", p), err <= th::kZeroPotentialAbs, err,
                                           th::kZeroPotentialAbs, "|mu - 1|"));
        } else if (is_single_full_pole(V)) {
            const double target = 1.0 - V.poles[0].lambda / P.gamma_hardy;
            const double err = std::abs(mus.back() - target);
            d["target"] = target;
            rec.verdicts.push_back(verdict(fmt::format("hardy_recovery[{}]", p), err <= th::kHardyRecoveryAbs, err,
                                           th::kHardyRecoveryAbs,
                                           fmt::format("|mu - (1 - lambda/gamma_H)| at n = {}, target {:.6g}",
                                                       ladder.back(), target)));
            if (mus.size() > 1) {
                bool toward = true;
                for (std::size_t k = 1; k < mus.size(); ++k) {
                    toward = toward && std::abs(mus[k] - target) < std::abs(mus[k - 1] - target);
                }
                rec.verdicts.push_back(verdict(fmt::format("hardy_trend[{}]", p), toward,
                                               std::abs(mus.front() - target) - err, 0.0,
                                               "error decreases strictly along the ladder"));
            }
        }
        pots.push_back(d);
    }
    rec.diagnostics["potentials"] = pots;
    if (cross) {
        rec.verdicts.push_back(verdict("cross_module", worst_cross <= th::kCrossModuleAbs, worst_cross,
                                       th::kCrossModuleAbs, "max |mu - mu_extended| at the finest level"));
    }
    rec.verdicts.push_back(verdict("solver_converged", worst_residual <= opts.tol, worst_residual, opts.tol,
                                   "largest Lanczos residual estimate"));
    const double elapsed = seconds_since(t0);
    rec.timing["compute_s"] = elapsed;
    if (std::any_of(c.potentials.begin(), c.potentials.end(), is_single_full_pole)) {
        rec.verdicts.push_back(verdict("runtime", elapsed < th::kHardyRecoverySeconds, elapsed,
                                       th::kHardyRecoverySeconds, "seconds for the whole ladder"));
    }
}

void run_lemma51(const config::ExperimentConfig& c, RunRecord& rec) {
    const auto ladder = ladder_of(c);
    const auto opts = mu_options(c);
    const auto& V = c.potentials.front();
    const auto& P = c.params;
    rec.columns = {"n", "mu", "iterations", "residual"};
    rec.plot_x = "n";
    rec.plot_y = "mu";
    std::vector<double> mus;
    for (int n : ladder) {
        const auto r = rayleigh::mu(V, make_grid(c, n), opts);
        mus.push_back(r.mu);
        rec.rows.push_back({static_cast<double>(n), r.mu, static_cast<double>(r.iterations), r.residual});
    }
    double lmax = 0.0;
    for (const auto& p : V.poles) lmax = std::max(lmax, p.lambda);
    const double bound = 1.0 - lmax / P.gamma_hardy;
    rec.diagnostics["trend"] = ladder_trend(mus);
    rec.diagnostics["bound_ii"] = bound;
    rec.verdicts.push_back(verdict("mu_at_most_one", mus.back() <= 1.0 + th::kHardyRecoveryAbs, mus.back(),
                                   1.0 + th::kHardyRecoveryAbs, "mu <= 1 up to the grid tolerance"));
    rec.verdicts.push_back(verdict("mu_at_most_hardy_bound", mus.back() <= bound + th::kHardyRecoveryAbs,
                                   mus.back(), bound + th::kHardyRecoveryAbs,
                                   "mu <= 1 - max lambda_i / gamma_H up to the grid tolerance"));
}

// Rayleigh values of the scaled family at every admissible scale.
void run_witness(const config::ExperimentConfig& c, RunRecord& rec) {
    const auto g = make_grid(c);
    const auto& V = c.potentials.front();
    const auto& P = c.params;
    const auto& o = c.options;
    const auto base = rayleigh::hardy_profile(P, o["eta"].get<double>(), o["support"].get<double>());
    const Point center = point_from(o["center"]);
    std::vector<double> rhos, skipped;
    double reach = 0.0;
    for (int k = 0; k < P.N; ++k) reach = std::max(reach, std::abs(center[k]));
    for (double rho : o["rhos"].get<std::vector<double>>()) {
        (reach + rho * base.support <= g.half_width() ? rhos : skipped).push_back(rho);
    }
    if (rhos.empty()) throw GeometryError("no probe scale fits in the box");
    std::sort(rhos.begin(), rhos.end());
    const auto rows = rayleigh::scaled_family_probe(V, base, rhos, center, g);
    rec.columns = {"rho", "value"};
    rec.plot_x = "rho";
    rec.plot_y = "value";
    double lowest = INFINITY, sum = 0.0;
    for (const auto& r : rows) {
        rec.rows.push_back({r.rho, r.value});
        lowest = std::min(lowest, r.value);
    }
    for (const auto& p : V.poles) sum += p.lambda;
    const double target = 1.0 - sum / P.gamma_hardy;
    rec.diagnostics["skipped_rhos"] = skipped;
    rec.diagnostics["limit_target"] = target;
    rec.diagnostics["discrete_mu"] = rayleigh::mu(V, g, mu_options(c)).mu;
    rec.verdicts.push_back(verdict("negative_value", lowest < 0.0, lowest, 0.0, "smallest Rayleigh value"));
    const double err = std::abs(rows.back().value - target);
    rec.verdicts.push_back(verdict("limit", err <= th::kWitnessLimitAbs, err, th::kWitnessLimitAbs,
                                   fmt::format("|value at rho = {:g} - (1 - sum lambda_i / gamma_H)|, target {:.6g}",
                                               rows.back().rho, target)));
}

void run_theorem15(const config::ExperimentConfig& c, RunRecord& rec) {
    if (c.options["mode"] == "necessity") return run_witness(c, rec);
    const auto g = make_grid(c);
    const auto& P = c.params;
    const auto& o = c.options;
    const int count = o["count"].get<int>(), npoles = o["poles"].get<int>();
    const double sum_rel = o["sum_rel"].get<double>(), radius = o["radius"].get<double>();
    const double ball = 0.25 * g.half_width(), sep = 4.0 * radius;

    // Draw every configuration first so results do not depend on the worker count.
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0), weight(0.2, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto in_ball = [&] {
        Point p{};
        double r2 = 0.0;
        for (int k = 0; k < P.N; ++k) {
            p[k] = gauss(rng);
            r2 += p[k] * p[k];
        }
        const double scale = ball * std::pow(unit(rng), 1.0 / P.N) / std::sqrt(r2);
        return scale * p;
    };
    std::vector<std::vector<Pole>> configs;
    for (int k = 0; k < count; ++k) {
        std::vector<double> w(npoles);
        double total = 0.0;
        for (double& x : w) total += (x = weight(rng));
        std::vector<Pole> poles;
        for (int i = 0; i < npoles; ++i) {
            Point a{};
            for (int attempt = 0;; ++attempt) {
                if (attempt > 10000) throw GeometryError("cannot place poles with the required separation");
                a = in_ball();
                bool ok = true;
                for (const auto& q : poles) ok = ok && distance(q.a, a) >= sep;
                if (ok) break;
            }
            poles.push_back(Pole{a, sum_rel * P.gamma_hardy * w[i] / total, radius});
        }
        configs.push_back(std::move(poles));
    }
    std::vector<rayleigh::MuResult> results(configs.size());
    const auto opts = mu_options(c);
    parallel_for(configs.size(), c.workers, [&](std::size_t k) {
        results[k] = rayleigh::mu(ThetaPotential::make(P, configs[k]), g, opts);
    });

    rec.columns = {"index", "sum_rel", "min_separation", "mu", "iterations"};
    rec.plot_x = "index";
    rec.plot_y = "mu";
    json placed = json::array();
    double worst = INFINITY;
    for (std::size_t k = 0; k < configs.size(); ++k) {
        double dmin = INFINITY;
        json poles = json::array();
        for (std::size_t i = 0; i < configs[k].size(); ++i) {
            poles.push_back({{"a", point_json(configs[k][i].a, P.N)}, {"lambda", configs[k][i].lambda}});
            for (std::size_t j = 0; j < i; ++j) dmin = std::min(dmin, distance(configs[k][i].a, configs[k][j].a));
        }
        placed.push_back(poles);
        worst = std::min(worst, results[k].mu);
        rec.rows.push_back({static_cast<double>(k), sum_rel, std::isinf(dmin) ? NAN : dmin, results[k].mu,
                            static_cast<double>(results[k].iterations)});
    }
    rec.diagnostics["configurations"] = placed;
    const double floor = 1.0 - sum_rel - th::kSufficiencySlack;
    rec.verdicts.push_back(verdict("sufficiency", worst >= floor, worst, floor,
                                   "min mu over configurations >= 1 - sum lambda_i / gamma_H - slack"));
}

void run_theorem14(const config::ExperimentConfig& c, RunRecord& rec) {
    if (c.options["mode"] == "witness") return run_witness(c, rec);
    const auto g = make_grid(c);
    const auto& P = c.params;
    std::vector<double> masses;
    for (double m : c.options["masses_rel"].get<std::vector<double>>()) masses.push_back(m * P.gamma_hardy);
    const auto rep = rayleigh::find_positive_configuration(masses, g, c.seed, c.options["margin"].get<double>(),
                                                           c.workers, mu_options(c));
    rec.columns = {"step", "mu"};
    rec.plot_x = "step";
    rec.plot_y = "mu";
    for (std::size_t k = 0; k < rep.mu_history.size(); ++k) rec.rows.push_back({static_cast<double>(k + 1), rep.mu_history[k]});
    json pos = json::array();
    for (const auto& p : rep.positions) pos.push_back(point_json(p, P.N));
    json wit = json::array();
    for (const auto& w : rep.witness) wit.push_back({w.rho, w.value});
    rec.diagnostics["status"] = to_string(rep.status);
    rec.diagnostics["reason"] = rep.reason;
    rec.diagnostics["positions"] = pos;
    rec.diagnostics["masses"] = rep.masses;
    rec.diagnostics["witness"] = wit;
    rec.diagnostics["mu"] = rep.mu;

    double sum = 0.0, largest = 0.0;
    for (double m : masses) {
        sum += m;
        largest = std::max(largest, m);
    }
    const bool possible = largest < P.gamma_hardy && sum < P.gamma_hardy;
    const auto expected = possible ? rayleigh::ConfigurationReport::Status::Found
                                   : rayleigh::ConfigurationReport::Status::Impossible;
    rec.verdicts.push_back(verdict("status", rep.status == expected, possible ? 1.0 : 0.0, 0.0,
                                   fmt::format("expected {}, got {}", to_string(expected), to_string(rep.status))));
    if (rep.status == rayleigh::ConfigurationReport::Status::Impossible && !rep.witness.empty()) {
        double lowest = INFINITY;
        for (const auto& w : rep.witness) lowest = std::min(lowest, w.value);
        rec.verdicts.push_back(verdict("witness_negative", lowest < 0.0, lowest, 0.0,
                                       "smallest Rayleigh value of the clustered witness"));
    }
}

void run_binding(const config::ExperimentConfig& c, RunRecord& rec) {
    const auto g = make_grid(c);
    const Point dir = point_from(c.options["direction"]);
    const auto sw = rayleigh::binding_sweep(c.potentials[0], c.potentials[1], dir,
                                            c.options["radii"].get<std::vector<double>>(), g, c.workers,
                                            mu_options(c));
    rec.columns = {"radius", "mu", "iterations", "residual"};
    rec.plot_x = "radius";
    rec.plot_y = "mu";
    for (const auto& r : sw.rows) {
        rec.rows.push_back({r.radius, r.mu, static_cast<double>(r.iterations), r.residual});
    }
    rec.diagnostics["mu_v1"] = sw.mu_v1;
    rec.diagnostics["mu_v2"] = sw.mu_v2;
    rec.diagnostics["warnings"] = sw.warnings;
    // Monotone tail over the last three radii: a diagnostic, not a verdict.
    bool monotone = true;
    for (std::size_t k = sw.rows.size() >= 3 ? sw.rows.size() - 2 : 1; k < sw.rows.size(); ++k) {
        monotone = monotone && sw.rows[k].mu >= sw.rows[k - 1].mu - th::kBindingMonotoneTol;
    }
    rec.diagnostics["monotone_tail"] = monotone;
    const double last = sw.rows.back().mu;
    rec.verdicts.push_back(verdict("positive_at_largest", last > 0.0, last, 0.0,
                                   fmt::format("mu at |y| = {:g}", sw.rows.back().radius)));
}

void run_prop16(const config::ExperimentConfig& c, RunRecord& rec) {
    const auto g = make_grid(c);
    const auto& V = c.potentials.front();
    const auto& P = c.params;
    const auto r = rayleigh::mu(V, g, mu_options(c));
    double lmax = std::max(0.0, V.lambda_inf);
    for (const auto& p : V.poles) lmax = std::max(lmax, p.lambda);
    const double threshold = 1.0 - lmax / P.gamma_hardy;
    const bool regime = r.mu < threshold - c.options["margin"].get<double>();
    const double radius = c.options["radius"].get<double>();
    const double fraction = rayleigh::mass_fraction_near_poles(r.minimizer, V, radius);

    // Profile of the minimizer along the first axis from the first pole.
    const Point a = V.poles.empty() ? Point{} : V.poles.front().a;
    const double h = g.spacing();
    rec.columns = {"distance", "value"};
    rec.plot_x = "distance";
    rec.plot_y = "value";
    std::vector<double> lr, lu;
    const auto& u = r.minimizer.values;
    const double sign = std::accumulate(u.begin(), u.end(), 0.0) >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.coordinate(i);
        bool on_axis = x[0] > a[0];
        for (int k = 1; k < P.N; ++k) on_axis = on_axis && std::abs(x[k] - a[k]) < 0.5 * h;
        if (!on_axis || x[0] - a[0] > 0.5 * g.half_width()) continue;
        const double d = x[0] - a[0];
        rec.rows.push_back({d, sign * u[i]});
        if (d >= 2.0 * h && d <= 16.0 * h && sign * u[i] > 0.0) {
            lr.push_back(std::log(d));
            lu.push_back(std::log(sign * u[i]));
        }
    }
    std::sort(rec.rows.begin(), rec.rows.end());
    json d = {{"mu", r.mu}, {"threshold", threshold}, {"attainment_regime", regime}, {"mass_fraction", fraction},
              {"radius", radius}, {"iterations", r.iterations}};
    if (lr.size() >= 2 && !V.poles.empty() && V.poles.front().lambda > 0.0 &&
        V.poles.front().lambda < P.gamma_hardy) {
        const double mr = std::accumulate(lr.begin(), lr.end(), 0.0) / lr.size();
        const double mu_ = std::accumulate(lu.begin(), lu.end(), 0.0) / lu.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t k = 0; k < lr.size(); ++k) {
            sxy += (lr[k] - mr) * (lu[k] - mu_);
            sxx += (lr[k] - mr) * (lr[k] - mr);
        }
        d["local_exponent_fit"] = sxy / sxx;
        d["local_exponent_a_lambda"] = a_lambda(P, V.poles.front().lambda);
    }
    rec.diagnostics = d;
    rec.verdicts.push_back(verdict("localization", !regime || fraction >= th::kAttainmentMassFraction, fraction,
                                   th::kAttainmentMassFraction,
                                   regime ? "attainment regime: mass fraction near the poles"
                                          : "outside the attainment regime; no localization expected"));
}

void run_lambda_curve(const config::ExperimentConfig& c, RunRecord& rec) {
    const auto& P = c.params;
    const double half = P.half_gap(), gh = P.gamma_hardy;
    const int points = c.options["points"].get<int>();
    rec.columns = {"alpha", "Lambda", "Lambda_over_gamma_H"};
    rec.plot_x = "alpha";
    rec.plot_y = "Lambda";
    bool decreasing = true;
    for (int j = 0; j < points; ++j) {
        const double f = th::kLambdaLowFrac + (th::kLambdaHighFrac - th::kLambdaLowFrac) * j / (points - 1);
        const double lam = lambda_of_alpha(P, f * half);
        if (!rec.rows.empty()) decreasing = decreasing && lam < rec.rows.back()[1];
        rec.rows.push_back({f * half, lam, lam / gh});
    }
    const double lo = rec.rows.front()[2], hi = rec.rows.back()[2];
    rec.diagnostics["gamma_H"] = gh;
    rec.verdicts.push_back(verdict("limit_at_zero", std::abs(lo - 1.0) <= th::kLambdaLimitRel, std::abs(lo - 1.0),
                                   th::kLambdaLimitRel, "|Lambda / gamma_H - 1| near alpha = 0"));
    rec.verdicts.push_back(verdict("limit_at_half_gap", hi < th::kLambdaLimitRel, hi, th::kLambdaLimitRel,
                                   "Lambda / gamma_H near alpha = (N - 2s) / 2"));
    rec.verdicts.push_back(verdict("decreasing", decreasing, decreasing ? 1.0 : 0.0, 1.0, "strictly decreasing"));
}

void run_angular_identity(const config::ExperimentConfig& c, RunRecord& rec) {
    const auto t0 = Clock::now();
    const auto& P = c.params;
    const double half = P.half_gap();
    const auto grid = angular::AngularGrid::make(P, c.options["m"].get<int>());
    rec.columns = {"alpha_frac", "alpha", "lambda", "mu1", "mu1_exact", "rel_err"};
    rec.plot_x = "alpha";
    rec.plot_y = "mu1";
    double worst = 0.0;
    for (double f : c.options["alphas_frac"].get<std::vector<double>>()) {
        const double alpha = f * half, lam = lambda_of_alpha(P, alpha);
        const auto res = angular::mu_k(lam, 1, grid);
        const double exact = alpha * alpha - half * half;
        const double rel = std::abs(res.mu_values[0] - exact) / std::abs(exact);
        worst = std::max(worst, rel);
        rec.rows.push_back({f, alpha, lam, res.mu_values[0], exact, rel});
    }
    const double elapsed = seconds_since(t0);
    rec.timing["compute_s"] = elapsed;
    rec.verdicts.push_back(verdict("identity", worst <= th::kAngularRel, worst, th::kAngularRel,
                                   "max relative error of mu_1(Lambda(alpha))"));
    rec.verdicts.push_back(verdict("runtime", elapsed < th::kAngularSeconds, elapsed, th::kAngularSeconds, "seconds"));
}

// Random trigonometric polynomial with integer wave vectors in [-band, band]^N.
DiscreteField band_limited(const SpectralGrid& g, int band, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int N = g.dim();
    const double w = M_PI / g.half_width();
    struct Mode {
        std::array<int, kMaxDim> k;
        double a, b;
    };
    std::vector<Mode> modes;
    std::array<int, kMaxDim> k{0, 0, 0};
    const int side = 2 * band + 1;
    int total = 1;
    for (int d = 0; d < N; ++d) total *= side;
    for (int flat = 0; flat < total; ++flat) {
        int rest = flat, norm2 = 0;
        for (int d = 0; d < N; ++d) {
            k[d] = rest % side - band;
            rest /= side;
            norm2 += k[d] * k[d];
        }
        if (norm2 == 0) continue;
        const double amp = 1.0 / (1.0 + std::sqrt(static_cast<double>(norm2)));
        modes.push_back(Mode{k, amp * gauss(rng), amp * gauss(rng)});
    }
    auto u = DiscreteField::zeros(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.coordinate(i);
        double acc = 0.0;
        for (const auto& m : modes) {
            double ph = 0.0;
            for (int d = 0; d < N; ++d) ph += m.k[d] * x[d];
            acc += m.a * std::cos(w * ph) + m.b * std::sin(w * ph);
        }
        u.values[i] = acc;
    }
    return u;
}

void run_kappa_identity(const config::ExperimentConfig& c, RunRecord& rec) {
    const auto g = make_grid(c);
    const auto tg = make_tgrid(c, g);
    const int count = c.options["count"].get<int>(), band = c.options["band"].get<int>();
    if (band < 1 || 2 * band >= g.n()) throw DomainError("band must lie in 1 .. n/2 - 1");
    const double ks = c.params.kappa_s;
    std::mt19937_64 rng(c.seed);
    std::vector<DiscreteField> fields;
    for (int k = 0; k < count; ++k) fields.push_back(band_limited(g, band, rng));
    std::vector<double> ratio(count);
    std::vector<std::vector<std::string>> warnings(count);
    parallel_for(static_cast<std::size_t>(count), c.workers, [&](std::size_t k) {
        const auto U = extension::extend(fields[k], tg);
        ratio[k] = extension::energy(U) / rayleigh::dsnorm_sq(fields[k]);
        warnings[k] = U.warnings;
    });
    rec.columns = {"index", "ratio", "rel_err"};
    rec.plot_x = "index";
    rec.plot_y = "ratio";
    double worst = 0.0;
    for (int k = 0; k < count; ++k) {
        const double rel = std::abs(ratio[k] / ks - 1.0);
        worst = std::max(worst, rel);
        rec.rows.push_back({static_cast<double>(k), ratio[k], rel});
    }
    rec.diagnostics["kappa_s"] = ks;
    rec.diagnostics["t_max"] = tg.t_max;
    rec.diagnostics["m_t"] = tg.m_t;
    rec.diagnostics["grading"] = tg.grading;
    rec.diagnostics["warnings"] = warnings.front();
    rec.verdicts.push_back(verdict("identity", worst <= th::kKappaRel, worst, th::kKappaRel,
                                   "max |energy(extend u) / (kappa_s ||u||^2) - 1|"));
}

void run_certificate(const config::ExperimentConfig& c, RunRecord& rec) {
    const auto& P = c.params;
    const auto g = make_grid(c);
    const auto tg = make_tgrid(c, g);
    const double alpha = c.options["alpha_frac"].get<double>() * P.half_gap();
    const double lam = lambda_of_alpha(P, alpha);
    const auto V = ThetaPotential::full_pole(P, lam);
    auto vbar = cell_averages(V, g);
    std::vector<double> vt(vbar.size());
    std::transform(vbar.begin(), vbar.end(), vt.begin(), [](double x) { return std::abs(x); });
    extension::Certificate cert{extension::build_upsilon(alpha, g, tg), 0.0, vbar, vt, {Point{}}};
    const int basis = c.options["basis"].get<int>();
    const double given = c.options["epsilon"].get<double>();
    cert.epsilon = given >= 0.0 ? given : std::max(0.0, extension::certificate_max_epsilon(cert, basis));
    const auto v = extension::certificate_check(cert, basis);
    const auto mu = rayleigh::mu_from_cells(vbar, g, mu_options(c));

    // Neumann flux against kappa_s Lambda |x|^{-2s} Upsilon along the first axis.
    const auto flux = extension::neumann_flux(cert.phi);
    rec.columns = {"x", "flux_ratio"};
    rec.plot_x = "x";
    rec.plot_y = "flux_ratio";
    const double h = g.spacing();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.coordinate(i);
        bool on_axis = x[0] > 0.5 * h;
        for (int k = 1; k < P.N; ++k) on_axis = on_axis && std::abs(x[k]) < 0.5 * h;
        if (!on_axis) continue;
        const double ref = P.kappa_s * lam * std::pow(x[0], -2.0 * P.s) * cert.phi.values[i];
        rec.rows.push_back({x[0], flux[i] / ref});
    }
    std::sort(rec.rows.begin(), rec.rows.end());
    rec.diagnostics = {{"alpha", alpha},
                       {"lambda", lam},
                       {"epsilon", cert.epsilon},
                       {"bound", v.bound},
                       {"mu", mu.mu},
                       {"continuum_mu", 1.0 - lam / P.gamma_hardy},
                       {"tests", v.tests},
                       {"worst_margin", v.worst_margin},
                       {"worst_t", v.worst_t},
                       {"worst_x", v.worst_x},
                       {"slack", v.slack},
                       {"warnings", cert.phi.warnings}};
    rec.verdicts.push_back(verdict("check_passes", v.pass, v.worst_margin, 0.0,
                                   fmt::format("weak supersolution inequality at epsilon = {:.6g}", cert.epsilon)));
    rec.verdicts.push_back(verdict("bound_below_mu", v.pass && v.bound <= mu.mu + th::kCertificateSlack, v.bound,
                                   mu.mu + th::kCertificateSlack, "epsilon / (1 + epsilon) <= mu + slack"));
}

}  // namespace

bool RunRecord::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::vector<double> RunRecord::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw DomainError("no column " + name);
    const auto k = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[k]);
    return out;
}

RunRecord run(const config::ExperimentConfig& cfg) {
    RunRecord rec;
    rec.experiment = cfg.experiment;
    rec.config = cfg.tree;
    rec.timing["started"] = utc_now();
    const auto t0 = Clock::now();
    try {
        const auto& e = cfg.experiment;
        if (e == "mu") run_mu(cfg, rec);
        else if (e == "lemma51") run_lemma51(cfg, rec);
        else if (e == "theorem15") run_theorem15(cfg, rec);
        else if (e == "theorem14") run_theorem14(cfg, rec);
        else if (e == "binding") run_binding(cfg, rec);
        else if (e == "prop16") run_prop16(cfg, rec);
        else if (e == "lambda_curve") run_lambda_curve(cfg, rec);
        else if (e == "angular_identity") run_angular_identity(cfg, rec);
        else if (e == "kappa_identity") run_kappa_identity(cfg, rec);
        else if (e == "certificate") run_certificate(cfg, rec);
        else throw DomainError("unknown experiment " + e);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& err) {
        throw Error(fmt::format("experiment {}: {}", cfg.experiment, err.what()));
    }
    rec.timing["finished"] = utc_now();
    rec.timing["elapsed_s"] = seconds_since(t0);
    return rec;
}

json to_json(const RunRecord& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr = json::array();
        for (double x : row) jr.push_back(std::isfinite(x) ? json(x) : json(nullptr));
        rows.push_back(jr);
    }
    json verdicts = json::array();
    for (const auto& v : r.verdicts) {
        verdicts.push_back({{"name", v.name},
                            {"pass", v.pass},
                            {"value", std::isfinite(v.value) ? json(v.value) : json(nullptr)},
                            {"threshold", std::isfinite(v.threshold) ? json(v.threshold) : json(nullptr)},
                            {"detail", v.detail}});
    }
    return {{"version", r.version},   {"experiment", r.experiment}, {"config", r.config},
            {"columns", r.columns},   {"rows", rows},               {"plot", {{"x", r.plot_x}, {"y", r.plot_y}}},
            {"diagnostics", r.diagnostics}, {"verdicts", verdicts}, {"timing", r.timing},
            {"all_pass", r.all_pass()}};
}

RunRecord record_from_json(const json& j) {
    auto num = [](const json& x) { return x.is_null() ? NAN : x.get<double>(); };
    RunRecord r;
    r.version = j.at("version").get<std::string>();
    r.experiment = j.at("experiment").get<std::string>();
    r.config = j.at("config");
    r.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) {
        std::vector<double> out;
        for (const auto& x : row) out.push_back(num(x));
        r.rows.push_back(std::move(out));
    }
    r.plot_x = j.at("plot").at("x").get<std::string>();
    r.plot_y = j.at("plot").at("y").get<std::string>();
    r.diagnostics = j.at("diagnostics");
    for (const auto& v : j.at("verdicts")) {
        r.verdicts.push_back(Verdict{v.at("name").get<std::string>(), v.at("pass").get<bool>(), num(v.at("value")),
                                     num(v.at("threshold")), v.at("detail").get<std::string>()});
    }
    r.timing = j.at("timing");
    return r;
}

}  // namespace frachardy::harness
