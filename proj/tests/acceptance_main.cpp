// Acceptance gate: one line per criterion, nonzero exit on any failure.
// Usage: acceptance [scenario-dir]

#include <cstdio>
#include <exception>

#include "adjlab/verify.hpp"

int main(int argc, char** argv) {
    std::vector<adjlab::CriterionResult> rows;
    try {
        rows = adjlab::acceptance_criteria(true);
        if (argc > 1) rows.push_back(adjlab::fixture_roundtrip(argv[1]));
    } catch (const std::exception& e) {
        std::printf("FAIL acceptance suite aborted (%s)\n", e.what());
        return 1;
    }
    bool all = true;
    for (const auto& r : rows) {
        std::printf("%s %s — %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        if (!r.pass) all = false;
    }
    std::printf("%s\n", all ? "all criteria hold" : "criteria failed");
    return all ? 0 : 1;
}
