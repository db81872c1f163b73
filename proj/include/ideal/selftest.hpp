// Embedded invariant suite behind the `selftest` command.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ideal {

struct CheckResult {
    std::string name;
    bool passed{false};
    double residual{0};
    double tolerance{0};
};

/// Negative-control hooks; defaults leave every check intact.
struct SelftestHooks {
    double gm_scale{1.0};  // scales GM seen by the propagator in the conic check
};

std::vector<CheckResult> run_selftest(const SelftestHooks& hooks = {});

/// Aligned table, one line per check, then a summary line.
void print_selftest(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace ideal
