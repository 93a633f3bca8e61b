#pragma once

// The subcommands of the gibbsgeo tool. Each writes its tables into the
// resolved output directory together with residuals.csv, one row per check.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gibbsgeo/config.hpp"
#include "gibbsgeo/report.hpp"

namespace gibbsgeo {

enum class Command { coexist, geometry, edge, exponents, all };

/// Throws ConfigError for an unknown name.
Command command_from_string(std::string_view name);

struct RunResult {
    std::filesystem::path output_dir;
    std::vector<ResidualReport> reports;
    std::vector<std::string> messages;  // diagnostics for failed steps

    bool ok() const { return all_pass(reports); }
};

/// Validates the config, creates the output directory and runs the command.
/// Numerical failures become failing reports rather than exceptions.
RunResult run_command(Command command, const RunConfig& cfg);

}  // namespace gibbsgeo
