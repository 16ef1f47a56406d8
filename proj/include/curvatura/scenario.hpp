#pragma once

#include <string>

namespace curvatura {

/// Exit codes of the scenario runner.
enum ExitCode {
    kOk = 0,
    kCheckFailed = 1,
    kConfigError = 2,
    kGeometryError = 3,
    kSolverError = 4,
};

struct RunOptions {
    std::string out_dir;       // overrides the config's output_dir when set
    bool no_timestamp = false; // omit the timestamp field from report.json
};

/// Runs a scenario config (JSON file): executes the requested analyses,
/// writes report.json plus CSV/OFF side files into the output directory, and
/// returns the exit status (0 iff all asserted checks pass).
int run_scenario(const std::string& config_path, const RunOptions& options);

/// Human-readable list of geometry kinds, analyses, and catalog patches.
std::string describe_scenarios();

/// Builds the scenario's mesh and writes it in OFF format.
int export_mesh(const std::string& config_path, const std::string& off_path);

} // namespace curvatura
