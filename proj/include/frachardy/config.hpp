#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "frachardy/potential.hpp"
#include "frachardy/specfun.hpp"

/// Experiment configuration files. The on-disk format is TOML (grammar in
/// docs/config.md); internally every configuration is a JSON tree, which is
/// also what a RunRecord echoes, so a record can be re-run as is.
namespace frachardy::config {

using nlohmann::json;

inline const std::vector<std::string> kExperiments = {
    "mu",       "lemma51",      "theorem15",        "theorem14",      "binding",
    "prop16",   "lambda_curve", "angular_identity", "kappa_identity", "certificate"};

struct GridSpec {
    int n = 0;
    double L = 0.0;
};

struct TGridSpec {
    int m_t = 0;
    double t_max = 0.0;    ///< 0: 10 / (smallest nonzero frequency)
    double grading = 0.0;  ///< 0: library default
};

struct ExperimentConfig {
    std::string experiment;
    FracParams params;
    std::optional<GridSpec> grid;
    std::optional<TGridSpec> tgrid;
    std::vector<ThetaPotential> potentials;
    json options;  ///< experiment table with defaults filled in
    std::uint64_t seed = 1;
    int workers = 1;
    json tree;  ///< normalized configuration (what gets echoed)
};

/// Parses TOML text; `source` names the file in error messages.
ExperimentConfig parse(const std::string& text, const std::string& source = "<string>");
ExperimentConfig load(const std::filesystem::path& path);

/// Validates a configuration tree. Errors name the offending key.
ExperimentConfig from_tree(const json& tree);

/// The same configuration with seed and worker count replaced.
ExperimentConfig with_overrides(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed,
                                std::optional<int> workers);

}  // namespace frachardy::config
