#pragma once

#include <cstdint>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace kripke::selftest {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240601;
    // Empty runs every criterion.
    std::set<int> only;
    unsigned jobs = 1;
};

std::string format_result(const CriterionResult& result);

// Runs the criteria in order; when `out` is given, prints each line as soon as
// its criterion finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream* out = nullptr);

} // namespace kripke::selftest
