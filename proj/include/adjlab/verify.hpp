#pragma once

#include <string>
#include <vector>

namespace adjlab {

struct CriterionResult {
    std::string name;
    bool pass = true;
    std::string detail;  // check counts, or the first failure
};

// Property suite covering every module.  `full` selects the wide grids
// (around a minute); the small grids finish in a few seconds.
std::vector<CriterionResult> acceptance_criteria(bool full);

// Shipped scenario files parse back to exactly the canned scenarios.
CriterionResult fixture_roundtrip(const std::string& dir);

}  // namespace adjlab
