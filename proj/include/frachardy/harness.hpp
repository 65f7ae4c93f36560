#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "frachardy/config.hpp"

namespace frachardy::harness {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

struct Verdict {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// Everything a run produces. `config` is the normalized configuration tree and
/// re-runs the experiment exactly; `timing` holds the only fields that vary
/// between identical runs.
struct RunRecord {
    std::string version = kVersion;
    std::string experiment;
    json config;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  ///< results table; NaN for blanks
    std::string plot_x, plot_y;             ///< columns of the primary curve
    json diagnostics = json::object();
    std::vector<Verdict> verdicts;
    json timing = json::object();  ///< started, finished, elapsed_s, per-step seconds

    bool all_pass() const;
    std::vector<double> column(const std::string& name) const;
};

RunRecord run(const config::ExperimentConfig& cfg);

json to_json(const RunRecord& record);
RunRecord record_from_json(const json& j);

}  // namespace frachardy::harness
