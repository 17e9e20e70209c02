#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// End-to-end verification suite: each criterion exercises a cross-module
// reproducible result and reports one pass/fail line.

namespace mmwave::acceptance {

struct CriterionResult {
    int id;
    std::string name;
    bool passed;
    std::string detail;
};

// Runs all criteria in order, streaming one "PASS"/"FAIL" line per criterion
// to `out` as it completes.
std::vector<CriterionResult> run_all(std::ostream& out);

// Convenience wrapper: run, stream, and return a process exit code (0 iff all
// criteria passed).
int run_and_report(std::ostream& out);

} // namespace mmwave::acceptance
