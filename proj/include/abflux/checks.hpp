#pragma once

// Invariant suite shared by the acceptance test binary and the `check` CLI
// command: every closed-form identity, operator property, and cross-route
// propagator comparison the library guarantees, each with a pinned tolerance.

#include <string>
#include <vector>

#include <json.hpp>

namespace abflux::checks {

struct CheckResult {
    std::string name;
    bool passed = false;
    double residual = 0.0;   // worst measured deviation
    double tolerance = 0.0;  // threshold (after scaling)
    double seconds = 0.0;
    std::string note;
};

struct CheckOptions {
    unsigned seed = 20260809;
    double tolerance_scale = 1.0;
    // harness self-test fault injection; "" = none.  Known faults:
    //   flip-lambda-sign  (sabotages the holonomy comparison)
    std::string fault;
};

/// Runs every check; a fault name that is not recognized throws InputError.
std::vector<CheckResult> run_all_checks(const CheckOptions& options);

nlohmann::json report_to_json(const std::vector<CheckResult>& results,
                              const CheckOptions& options);

}  // namespace abflux::checks
