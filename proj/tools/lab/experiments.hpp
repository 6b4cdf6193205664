// experiments.hpp — the rabi-lab experiments and their artifact files

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "cache.hpp"
#include "config.hpp"
#include "json.hpp"

namespace lab {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kConfigError = 2, kNumericalFailure = 3, kResourceCap = 4 };

struct RunReport {
    std::vector<std::filesystem::path> files;
    nlohmann::json results = nlohmann::json::object();
    std::vector<std::string> warnings;
};

/// Executes `config.experiment`, writing CSV files and JSON sidecars into config.output_dir.
/// Throws ConfigError for invalid options and rabi errors for numerical problems.
RunReport run(const RunConfig& config, EigenCache& cache);

/// run() with exceptions mapped to exit codes and diagnostics written to `err`.
int run_with_status(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Exit code for the exception currently being handled.
int exit_code_for(const std::exception_ptr& error, std::ostream& err);

/// Version string recorded in every sidecar.
std::string code_version();

}  // namespace lab
