#pragma once

#include <climits>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "adjlab/ext_real.hpp"

namespace adjlab {

using DivId = int;

enum class PointKind { Crossing, Free, Off };

// A named point of the current model.  `on` lists the divisors through it
// (two for a crossing, one for a free point, none for a point off the
// configuration); simple normal crossings means never more than two.
struct PointInfo {
    std::string name;
    PointKind kind = PointKind::Off;
    std::vector<DivId> on;
    int depth = 1;     // 1 + max depth of the divisors through it
    int creator = -1;  // tree node whose blowup created it, -1 if declared
};

struct PrimeDiv {
    DivId id = -1;
    std::string name;
    int origin_node = -1;  // -1: divisor of the original model
    int depth = 0;         // 0 for originals, blown-up point's depth else
};

// One blowup: the consumed point, the divisors that passed through it, the
// exceptional divisor it produced and the fresh crossing points on it.
struct TreeNode {
    std::string point;
    std::vector<DivId> through;
    DivId exceptional = -1;
    std::vector<std::string> created_points;
    int parent = -1;  // node that created the blown-up point, -1 if declared
    int depth = 1;    // depth of the blown-up point
};

// Combinatorial marked surface: prime divisors, named points, and the
// blowup history.  Purely incidence-level; no coordinates.
struct SncModel {
    std::vector<PrimeDiv> divisors;
    std::map<std::string, PointInfo> points;  // live (not yet blown up)
    std::vector<TreeNode> tree;
};

// Builders for the original model.  Divisor names matching E<number> are
// reserved for exceptionals.  All throw InputError on reuse or bad refs.
DivId add_divisor(SncModel& model, const std::string& name);
void add_crossing(SncModel& model, const std::string& point, DivId a, DivId b);
void declare_free_point(SncModel& model, const std::string& point, DivId on);
void declare_off_point(SncModel& model, const std::string& point);

DivId divisor_by_name(const SncModel& model, const std::string& name);
const PointInfo& point_info(const SncModel& model, const std::string& point);
// All live crossing points lying on both divisors.
std::vector<std::string> crossing_points(const SncModel& model, DivId a,
                                         DivId b);

// Monoidal transform at a live point.  Returns the new model (the input is
// untouched) and the exceptional divisor's id.  The consumed crossing
// disappears, the exceptional E<n> crosses each divisor that passed through
// the point at a fresh point named <point>/<divisor>.
std::pair<SncModel, DivId> blow_up(const SncModel& model,
                                   const std::string& point);

// Finite truncation of a b-divisor: multiplicities for every divisor of a
// model, tagged with the expansion depth that produced it.
struct BDivTrace {
    std::map<DivId, ExtReal> mult;
    int depth = 0;
};

BDivTrace trace_of(const SncModel& model,
                   const std::map<std::string, Rat>& by_name);

// Codiscrepancy of the exceptional of blowing up `point`:
// (sum of trace multiplicities of the divisors through it) - 1.
ExtReal codiscrepancy_step(const SncModel& model, const BDivTrace& trace,
                           const std::string& point);

// Blows up every live crossing point, `rounds` times over, in name order
// within each round.  The visitor runs after each blowup with the model so
// far and the index of the new tree node.
SncModel expand_crossings(
    SncModel model, int rounds,
    const std::function<void(const SncModel&, int)>& visit = nullptr);

struct BDivExpansion {
    SncModel model;
    BDivTrace trace;
};

// Codiscrepancy b-divisor of (model, trace) on the depth-k crossing tree.
// Every exceptional value is produced by the one-step recursion and
// independently re-derived by total-transform accounting (pulling back the
// divisor and the canonical class through the whole tower); disagreement
// would be an internal error.
BDivExpansion codiscrepancy_bdiv(const SncModel& model, const BDivTrace& trace,
                                 int depth);

// Total-transform closure of a divisor supported on the model: each
// exceptional receives the sum of the multiplicities through its center.
BDivExpansion pullback_closure(const SncModel& model, const BDivTrace& trace,
                               int depth);

struct BDivCompare {
    bool equal = true;
    std::string divergence;  // shallowest differing divisor, with values
};

// Exact comparison of two expansions of the same root model.  Throws
// TreeMismatch when the underlying blowup trees differ.  Divisors deeper
// than max_depth are ignored.
BDivCompare bdiv_equal(const BDivExpansion& a, const BDivExpansion& b,
                       int max_depth = INT_MAX);

// Forgets exceptional multiplicities, returning the trace on the original
// model.  For a birational contraction this is the divisorial part of
// adjunction: the codiscrepancy b-divisor of the pushed-forward pair
// restricted back to the root, so the b-divisor of the pair is recovered by
// codiscrepancy_bdiv of the result.
BDivTrace pushforward_trace(const SncModel& model, const BDivTrace& trace);
inline BDivTrace birational_div_adj(const SncModel& model,
                                    const BDivTrace& trace) {
    return pushforward_trace(model, trace);
}

}  // namespace adjlab
