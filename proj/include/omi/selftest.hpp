#pragma once

// Invariant checks across all modules, runnable from the CLI (`selftest`)
// and reused by the acceptance suite.

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace omi {

struct CheckOutcome {
    bool passed = false;
    std::string detail;  // measured vs expected
};

struct CheckResult {
    std::string name;
    CheckOutcome outcome;
    double seconds = 0.0;
};

struct Check {
    std::string name;
    std::function<CheckOutcome()> run;
};

// All checks in a fixed order.
const std::vector<Check>& selftest_checks();

// Runs one check by name; exceptions become failures naming the error.
CheckResult run_check(std::string_view name);

struct SelftestReport {
    std::vector<CheckResult> checks;
    double seconds = 0.0;
    bool passed() const;
};

SelftestReport run_selftest();

// Observed RK4 order over three successive halvings of a coarse step.
struct OrderReport {
    std::vector<double> dts;
    std::vector<double> errors;  // vs a reference at dts[0] / 64
    std::vector<double> orders;  // log2(errors[i] / errors[i+1])
};
OrderReport rk4_convergence();

}  // namespace omi
