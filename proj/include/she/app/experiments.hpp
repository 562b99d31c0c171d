#pragma once

// Experiment dispatch: runs a parsed config, writes artifacts into the output
// directory (CSV and/or JSON per config, plus manifest.json), and returns the
// process exit code together with a human-readable summary.

#include <string>
#include <vector>

#include "she/app/config.hpp"

namespace she::app {

struct RunResult {
    int exit_code = 0;               // 0 ok, 1 verification reported not-ok
    std::vector<std::string> files;  // paths written (relative to the output dir)
    std::string summary;             // text for stdout
};

// Throws ConfigError / NumericError for exit codes 2 / 3; the CLI maps them.
RunResult run_experiment(const ExperimentConfig& cfg);

} // namespace she::app
