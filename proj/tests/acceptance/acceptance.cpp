// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "frachardy/config.hpp"
#include "frachardy/error.hpp"
#include "frachardy/harness.hpp"
#include "frachardy/potential.hpp"
#include "frachardy/rayleigh.hpp"
#include "frachardy/thresholds.hpp"

using namespace frachardy;
namespace th = frachardy::thresholds;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void add(bool ok, std::string note) {
        pass = pass && ok;
        notes.push_back(std::move(note));
    }
};

std::string base_name(const std::string& v) { return v.substr(0, v.find('[')); }

// Runs a shipped configuration and folds the selected verdicts (all if empty) into `out`.
void from_config(Outcome& out, const std::string& file, const std::set<std::string>& names = {}) {
    const auto cfg = config::load(std::filesystem::path(FRACHARDY_CONFIG_DIR) / file);
    const auto rec = harness::run(cfg);
    for (const auto& v : rec.verdicts) {
        if (!names.empty() && !names.count(base_name(v.name))) continue;
        out.add(v.pass, fmt::format("{}:{} {} {:.4g} vs {:.4g}", file, v.name, v.pass ? "ok" : "FAILED", v.value,
                                    v.threshold));
    }
}

// Grid-aligned translations, Kelvin identities and the Lipschitz bound.
void invariance(Outcome& out) {
    const auto P = FracParams::make(1, 0.25);
    const auto g = SpectralGrid::make(P, 2048, 32.0);
    auto at = [](double x) {
        Point p{};
        p[0] = x;
        return p;
    };
    Remainder rem;
    rem.terms.emplace_back(GaussianBump{at(3.0), 0.1, 1.0});
    const auto v = ThetaPotential::make(P, {Pole{at(-2.0), 0.4 * P.gamma_hardy, 1.0}, Pole{at(1.5), 0.3 * P.gamma_hardy, 1.0}},
                                        0.0, 1.0, rem);
    const double mu0 = rayleigh::mu(v, g).mu;
    double worst_shift = 0.0;
    for (int k : {-37, 5, 64}) {
        worst_shift = std::max(worst_shift, std::abs(rayleigh::mu(translate(v, at(k * g.spacing())), g).mu - mu0));
    }
    out.add(worst_shift <= th::kTranslationAbs,
            fmt::format("translation |dmu| {:.3g} vs {:.3g}", worst_shift, th::kTranslationAbs));

    // Kelvin: K[V](x) = |x|^{-4s} V(x / |x|^2) and K[K[V]] = V at random samples.
    double worst_kelvin = 0.0;
    std::mt19937_64 rng(7);
    for (int N : {1, 2, 3}) {
        const auto Q = FracParams::make(N, 0.25);
        Point a{}, b{}, c{};
        a[0] = 0.7;
        b[0] = -1.9;
        c[0] = 2.5;
        if (N > 1) {
            a[1] = 0.3;
            b[1] = 0.8;
        }
        Remainder r;
        r.terms.emplace_back(GaussianBump{c, -0.3, 0.8});
        const auto w = ThetaPotential::make(Q, {Pole{a, 0.3 * Q.gamma_hardy, 0.5}, Pole{b, -0.2, 0.4}},
                                            0.25 * Q.gamma_hardy, 6.0, r);
        const auto k1 = kelvin(w), k2 = kelvin(k1);
        std::uniform_real_distribution<double> d(-6.0, 6.0);
        for (int i = 0; i < 200; ++i) {
            Point x{};
            for (int j = 0; j < N; ++j) x[j] = d(rng);
            const Point xi = (1.0 / (norm(x) * norm(x))) * x;
            bool ok = norm(x) > 1e-3;
            for (const auto& p : w.poles) ok = ok && distance(x, p.a) > 1e-3 && distance(xi, p.a) > 1e-3;
            if (!ok) continue;
            const double expect = std::pow(norm(x), -4.0 * Q.s) * evaluate(w, xi);
            const double vx = evaluate(w, x);
            worst_kelvin = std::max(worst_kelvin, std::abs(evaluate(k1, x) - expect) / std::max(1.0, std::abs(expect)));
            worst_kelvin = std::max(worst_kelvin, std::abs(evaluate(k2, x) - vx) / std::max(1.0, std::abs(vx)));
        }
    }
    out.add(worst_kelvin <= th::kKelvinAbs, fmt::format("Kelvin {:.3g} vs {:.3g}", worst_kelvin, th::kKelvinAbs));

    // |mu(V + dW) - mu(V)| <= ||dW||_{N/2s} / S + slack for seeded Gaussian bumps.
    const double S = rayleigh::sobolev_constant(g);
    std::uniform_real_distribution<double> amp(-0.2, 0.2), ctr(-8.0, 8.0), wid(0.5, 2.0);
    double worst_excess = -INFINITY;
    for (int k = 0; k < 5; ++k) {
        const GaussianBump bump{at(ctr(rng)), amp(rng), wid(rng)};
        Remainder dr;
        dr.terms.emplace_back(bump);
        const auto dw = ThetaPotential::make(P, {}, 0.0, 1.0, dr);
        const double norm_dw = rayleigh::lebesgue_norm(cell_averages(dw, g), g, P.sobolev_exponent() / (P.sobolev_exponent() - 2.0));
        const double mu1 = rayleigh::mu(add(v, dw), g).mu;
        worst_excess = std::max(worst_excess, std::abs(mu1 - mu0) - norm_dw / S);
    }
    out.add(worst_excess <= th::kLipschitzSlack,
            fmt::format("Lipschitz max(|dmu| - |dW|/S) {:.3g} vs {:.3g}", worst_excess, th::kLipschitzSlack));
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        void (*check)(Outcome&);
    };
    const std::vector<Criterion> criteria = {
        {1, "Hardy-constant recovery", [](Outcome& o) { from_config(o, "hardy_recovery.toml"); }},
        {2, "angular identity",
         [](Outcome& o) {
             from_config(o, "angular_n2.toml");
             from_config(o, "angular_n1.toml");
         }},
        {3, "kappa_s identity",
         [](Outcome& o) {
             from_config(o, "kappa_n1.toml");
             from_config(o, "kappa_n2.toml");
         }},
        {4, "Lambda limits",
         [](Outcome& o) {
             from_config(o, "lambda_curve.toml", {"limit_at_zero", "limit_at_half_gap"});
             from_config(o, "lambda_curve_n2.toml", {"limit_at_zero", "limit_at_half_gap"});
         }},
        {5, "sufficiency (20 random 3-pole configurations)",
         [](Outcome& o) { from_config(o, "sufficiency.toml", {"sufficiency"}); }},
        {6, "necessity witness", [](Outcome& o) { from_config(o, "witness.toml", {"negative_value", "limit"}); }},
        {7, "localization of binding", [](Outcome& o) { from_config(o, "binding.toml", {"positive_at_largest"}); }},
        {8, "invariance suite", invariance},
        {9, "cross-module oracle", [](Outcome& o) { from_config(o, "cross_check.toml", {"cross_module"}); }},
        {10, "certificate soundness",
         [](Outcome& o) { from_config(o, "certificate.toml", {"check_passes", "bound_below_mu"}); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        Outcome out;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.check(out);
        } catch (const std::exception& e) {
            out.add(false, fmt::format("error: {}", e.what()));
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string notes;
        for (const auto& n : out.notes) notes += (notes.empty() ? "" : "; ") + n;
        std::printf("%s criterion %d: %s [%.1fs] (%s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    notes.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
