#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "frachardy/config.hpp"
#include "frachardy/emit.hpp"
#include "frachardy/error.hpp"
#include "frachardy/harness.hpp"
#include "frachardy/potential.hpp"
#include "frachardy/specfun.hpp"

namespace fh = frachardy;

namespace {

std::vector<std::string> split_formats(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        if (item != "json" && item != "csv" && item != "svg") {
            throw fh::DomainError("unknown format '" + item + "' (expected json, csv, svg)");
        }
        out.push_back(item);
    }
    return out;
}

int cmd_run(const std::string& file, const std::string& out_dir, const std::string& formats,
            std::optional<std::uint64_t> seed, std::optional<int> workers) {
    auto cfg = fh::config::load(file);
    if (seed || workers) cfg = fh::config::with_overrides(cfg, seed, workers);
    const auto fmts = split_formats(formats);
    const auto rec = fh::harness::run(cfg);
    const std::string stem = std::filesystem::path(file).stem().string();
    for (const auto& f : fmts) std::cerr << "wrote " << fh::emit::write(rec, f, out_dir, stem).string() << "\n";
    for (const auto& v : rec.verdicts) {
        std::cout << (v.pass ? "PASS " : "FAIL ") << rec.experiment << "." << v.name << "  value=" << v.value
                  << " threshold=" << v.threshold << "  (" << v.detail << ")\n";
    }
    return rec.all_pass() ? 0 : 2;
}

int cmd_validate(const std::string& file) {
    const auto cfg = fh::config::load(file);
    nlohmann::json out = {{"file", file}, {"experiment", cfg.experiment}, {"valid", true}};
    nlohmann::json pots = nlohmann::json::array();
    for (const auto& v : cfg.potentials) {
        const auto rep = fh::validate_theta(v, cfg.params);
        pots.push_back({{"poles", v.poles.size()},
                        {"sum_positive", rep.sum_positive},
                        {"sum_masses", rep.sum_masses},
                        {"all_configurations_positive", rep.all_configurations_positive},
                        {"some_configuration_positive", rep.some_configuration_positive},
                        {"remainder", fh::to_string(v.remainder.kind())},
                        {"notes", rep.notes}});
    }
    out["potentials"] = pots;
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_constants(int N, double s) {
    const auto P = fh::FracParams::make(N, s);
    const nlohmann::json out = {{"N", N}, {"s", s}, {"C_Ns", P.c_ns}, {"kappa_s", P.kappa_s},
                                {"gamma_H", P.gamma_hardy}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional Hardy-type potentials: experiments at desk scale"};
    app.require_subcommand(1);

    std::string run_file, out_dir = ".", formats = "json";
    std::uint64_t seed = 0;
    int workers = 1;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", run_file, "Config file (TOML)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--format", formats, "Comma-separated output formats: json,csv,svg");
    auto* seed_opt = run->add_option("--seed", seed, "Override the config seed");
    auto* workers_opt = run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    std::string validate_file;
    auto* validate = app.add_subcommand("validate", "Parse and validate a config file");
    validate->add_option("config", validate_file, "Config file (TOML)")->required()->check(CLI::ExistingFile);

    int N = 0;
    double s = 0.0;
    auto* constants = app.add_subcommand("constants", "Print C(N,s), kappa_s and gamma_H as JSON");
    constants->add_option("--N", N, "Dimension")->required();
    constants->add_option("--s", s, "Fractional order")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) {
            return cmd_run(run_file, out_dir, formats,
                           *seed_opt ? std::optional<std::uint64_t>(seed) : std::nullopt,
                           *workers_opt ? std::optional<int>(workers) : std::nullopt);
        }
        if (*validate) return cmd_validate(validate_file);
        if (*constants) return cmd_constants(N, s);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
