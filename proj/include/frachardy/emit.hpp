#pragma once

#include <filesystem>
#include <string>

#include "frachardy/harness.hpp"

namespace frachardy::emit {

/// Results table as CSV (header line, then one line per row).
std::string csv(const harness::RunRecord& record);

/// Line plot of the record's primary curve with labeled axes.
std::string svg(const harness::RunRecord& record);

/// Writes `<dir>/<stem>.<format>`; throws IoError if it cannot.
std::filesystem::path write(const harness::RunRecord& record, const std::string& format,
                            const std::filesystem::path& dir, const std::string& stem);

}  // namespace frachardy::emit
