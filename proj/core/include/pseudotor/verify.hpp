#pragma once

#include <string>
#include <vector>

#include "pseudotor/config.hpp"

namespace pseudotor {

/// One verification check: a named statistic compared against a threshold.
/// `claim` states the mathematical property being verified. `op` is "<=" for
/// residual bounds and ">=" for control experiments that must NOT be small.
struct CheckResult {
    std::string name;
    std::string claim;
    double statistic = 0.0;
    double threshold = 0.0;
    std::string op = "<=";
    bool pass = false;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Run the full verification suite for the twelve acceptance areas plus the
/// supporting oracle checks. Deterministic for a fixed config.
VerificationReport run_verification(const RunConfig& cfg);

}  // namespace pseudotor
