#pragma once

#include <string>
#include <vector>

namespace rdbc {

/// Deliberate corruption used to confirm the suite can fail.
enum class Fault {
    None,
    P10Sign, ///< observer kernel P and p10 negated
    LSign,   ///< inverse controller kernel L negated
};

Fault parse_fault(const std::string& name);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Runs every invariant check on the paper parameters. Deterministic.
std::vector<CheckResult> run_invariant_suite(Fault fault = Fault::None);

} // namespace rdbc
