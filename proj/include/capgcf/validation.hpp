#pragma once

// Invariant suites, one per module. Each check records the measured quantity
// next to the bound it is held to.

#include <string>
#include <vector>

namespace capgcf::validation {

struct Check {
    std::string module;
    std::string invariant;
    bool passed = false;
    double measured = 0.0;
    double bound = 0.0;
    std::string note;
};

/// cap_domain, body, convex_analysis, flow_engine, soliton, cli.
std::vector<std::string> suite_names();

/// InvalidArgument for an unknown suite.
std::vector<Check> run_suite(const std::string& module);
std::vector<Check> run_all();

/// Fixed-width table: module, invariant, measured, bound, PASS/FAIL, note.
std::string table(const std::vector<Check>& checks);

bool all_passed(const std::vector<Check>& checks);

}  // namespace capgcf::validation
