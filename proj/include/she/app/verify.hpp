#pragma once

// The acceptance suite: numbered end-to-end checks over the whole library,
// shared by `shecli verify-all` and the standalone acceptance runner.  Each
// check states its tolerance in the detail string and never fabricates a
// pass: engine exceptions fail the check with the diagnostic attached.

#include <string>
#include <vector>

namespace she::app {

struct CheckResult {
    int number = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<CheckResult> run_acceptance_checks();

// Plain-text table, one line per check.
std::string format_check_table(const std::vector<CheckResult>& results);

} // namespace she::app
