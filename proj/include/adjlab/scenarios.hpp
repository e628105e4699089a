#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adjlab/cover.hpp"
#include "adjlab/curves.hpp"

namespace adjlab {

// 64-bit linear congruential generator,
//   state <- 6364136223846793005 * state + 1442695040888963407  (mod 2^64),
// used for every seeded construction so scenarios are reproducible from
// the seed alone.
struct Lcg64 {
    std::uint64_t state;
    explicit Lcg64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return state;
    }
    long range(long lo, long hi) {  // inclusive bounds
        return lo + static_cast<long>(next() %
                                      static_cast<std::uint64_t>(hi - lo + 1));
    }
};

enum class ScenarioKind { Curve, Cover };

// Checkable claims attached to a scenario.  Values are exact; the note
// says in words where the claim comes from.
struct Expected {
    std::optional<bool> stabilizes;
    std::optional<int> blowups;
    std::optional<int> saturations;
    // point name -> divisorial multiplicity of the exceptional of its
    // blowup, evaluated on the state as loaded (before any stabilization)
    std::map<std::string, ExtReal> point_values;
    std::map<std::string, ExtReal> disc_values;  // curve: base point -> d'
    std::map<std::string, std::vector<ExtReal>> moduli_values;  // per branch
    std::string note;
};

struct GenDecl {
    std::string name;
    Rat sqrt_of;
};

struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::Cover;
    CurveCover curve;  // meaningful when kind == Curve
    CoverState cover;  // meaningful when kind == Cover
    int cap = 100;     // default stabilization cap for cover runs
    ContextPtr ctx;    // null when every value is rational
    std::vector<GenDecl> generators;
    Expected expected;
};

// One fiber over the base point "t" with the given (multiplicity,
// boundary) branches; expectations carry the threshold-oracle discriminant
// and the per-branch moduli defects.
Scenario example2(const std::vector<std::pair<long, Rat>>& branches);

// `count` identical branches (m, d): the symmetric situation where every
// moduli multiplicity vanishes.
Scenario example3_galois(long m, const Rat& d, int count);

// One base curve C with sheet multiplicities (1, 0) and marked free points
// p and q on it; `punctured` removes p's preimage on the sheet carrying
// the curve.
Scenario example4(bool punctured);

// Two base curves crossing once, sheet multiplicities (d1, 1) and (1, d2).
// Requires d1, d2 <= 1.
Scenario example5(const ExtReal& d1, const ExtReal& d2);

// Random double cover: 2..max_divisors base curves, up to max_crossings
// crossings, multiplicities in [0, 1] with denominators <=
// denominator_bound, no punctures.  Pure in the seed.
Scenario random_cover(std::uint64_t seed, int max_divisors, int max_crossings,
                      long denominator_bound);

struct TowerSample {
    CurveCover lower;  // Y over Z; its own d values are ignored by tower ops
    CurveCover upper;  // X over Y
    CurveCover composite;
};

// Random two-level tower with degrees <= max_degree, up to max_points
// marked base points, boundary denominators <= denominator_bound.  Pure in
// the seed.
TowerSample random_tower_sample(std::uint64_t seed, int max_points,
                                long max_degree, long denominator_bound);

// The composite of random_tower_sample as a curve scenario, with
// threshold-oracle expectations at every marked base point.
Scenario random_tower(std::uint64_t seed, int max_points, long max_degree,
                      long denominator_bound);

std::vector<std::string> canned_names();
Scenario canned(const std::string& name);  // InputError on unknown names

}  // namespace adjlab
