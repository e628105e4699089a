#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "adjlab/surface.hpp"

namespace adjlab {

// One sheet's copy of a base divisor.  Copies disappear over punctures:
// an exceptional created while a sheet is dead at the center has no copy
// on that sheet.
struct SheetCopy {
    bool present = true;
    ExtReal mult;
};

// Unramified n-sheet cover of a marked surface, with a divisor upstairs
// recorded as per-sheet multiplicities, a distinguished reduced boundary
// downstairs (Supp of the divisorial part once normalized), and punctures.
// Sheets are disjoint copies of the base, so upstairs divisors on
// different sheets never meet.
struct CoverState {
    SncModel base;
    int sheets = 2;
    std::set<DivId> boundary;                    // base divisors in the boundary
    std::map<DivId, std::vector<SheetCopy>> up;  // per divisor, per sheet
    std::map<std::string, std::set<int>> dead;   // punctured sheets per point
};

// Builds a cover over `base` with every copy present; `mults` lists
// per-sheet multiplicities for some divisors, all others get zeros.
CoverState make_cover(SncModel base, int sheets, std::set<DivId> boundary,
                      const std::map<DivId, std::vector<ExtReal>>& mults);

// Removes the preimage of a recorded point on one sheet.
void puncture(CoverState& st, int sheet, const std::string& point);

// Checks multiplicities <= 1 (NotGLC otherwise) and structural sanity:
// copy vectors sized to `sheets`, original divisors outside the boundary
// carry zeros, punctures reference recorded points (InputError).
void validate_cover(const CoverState& st);

// Every boundary divisor's multiplicity maxes out at exactly 1.
bool is_normalized(const CoverState& st);

// Multiplicity of the divisorial part downstairs at a base divisor: the
// max over the sheets that still carry a copy.  EmptyFiber when none does.
ExtReal ddiv_mult_at(const CoverState& st, DivId divisor);
// At a recorded point: the divisorial-part multiplicity the exceptional of
// its blowup would receive — max over non-punctured sheets of (sum of the
// upstairs multiplicities through the preimage point) - 1.  EmptyFiber when
// every sheet is punctured there.
ExtReal ddiv_mult_at(const CoverState& st, const std::string& point);

// The divisorial part's trace on the whole base model.
BDivTrace ddiv_trace(const CoverState& st);

// The divisorial part as a truncated b-divisor: every live crossing is
// blown up, `depth` rounds over, pulling the pair back crepantly on each
// surviving sheet; each exceptional's value is the max over its sheets.
// Punctures propagate down the tower.  EmptyFiber on a fully dead center.
BDivExpansion ddiv_bdiv(const CoverState& st, int depth);

// Local BP test at a live base crossing of a normalized state: the actual
// multiplicity (ddiv_mult_at the point) equals the value predicted from
// the downstairs trace (codiscrepancy_step).  Equivalently, max_s(u_s+v_s)
// = max_s(u_s) + max_s(v_s): some sheet attains both maxima.
bool bp_local_ok(const CoverState& st, const std::string& crossing);

// Crepant cover blowup at any live point: blows up the base and the
// preimages on live sheets; exceptional copies get the crepant values
// (sum through the center - 1), punctures propagate to the fresh points.
// No renormalization, the boundary is unchanged.  EmptyFiber when every
// sheet is dead at the point.
std::pair<CoverState, DivId> cover_blow_up(const CoverState& st,
                                           const std::string& point);

enum class StepKind { Normalization, Saturation, Blowup };

struct Sub1Entry {
    DivId div = -1;
    int sheet = -1;
    ExtReal mult;
    std::string divisor_name;
};

// Termination bookkeeping for rational runs: m * (1 - min sub-1 mult) with
// m the lcm of the normalized input denominators, how many copies attain
// the min, and how many (crossing, obstructor) pairs block the chosen one.
struct Measure {
    Rat scaled_comult;
    long count_at_min = 0;
    long bad_pairs = 0;
};

struct StepRecord {
    StepKind kind = StepKind::Normalization;
    std::string location;  // point name (blowup) or divisor name
    int sheet = -1;        // saturation target
    std::vector<std::optional<ExtReal>> crepant;  // per sheet; nullopt = gone
    ExtReal ddiv;   // max of crepant over surviving sheets
    ExtReal shift;  // renormalization amount
    std::optional<std::pair<ExtReal, ExtReal>> comult_pair;  // blowups
    std::optional<Measure> measure;
    std::vector<Sub1Entry> sub1_after;
};

// Adds (1 - max sheet mult) times the pulled-back divisor for every
// boundary divisor not yet maxing at 1, making the state normalized.  The
// divisorial b-divisor changes exactly by the pullback closure of what was
// added, so BP validity is untouched.
std::pair<CoverState, std::vector<StepRecord>> normalize(const CoverState& st);

// Sub-1 boundary copies, ordered by (divisor id, sheet).
std::vector<Sub1Entry> sub1_divisors(const CoverState& st);

// Sub-1 boundary copies whose base image meets this copy's image while the
// copies are disjoint upstairs (different sheet, or no surviving common
// crossing).  These are what block saturation.
std::vector<Sub1Entry> obstructors_of(const CoverState& st, DivId div,
                                      int sheet);

// Sets the copy's multiplicity to 1.  Legal only when nothing obstructs it
// (SaturationIllegal otherwise); afterwards the divisorial b-divisor is
// verified unchanged to `check_depth` (SaturationIllegal on failure, which
// punctured states can trigger).  check_depth 0 skips the verification.
std::pair<CoverState, StepRecord> saturate(const CoverState& st, DivId div,
                                           int sheet, int check_depth = 3);

// One algorithm blowup at a live base crossing of a normalized state:
// crepant cover blowup, then the exceptional is renormalized by
// (1 - max crepant) times its pullback and joins the boundary.
std::pair<CoverState, StepRecord> blowup_step(const CoverState& st,
                                              const std::string& crossing);

struct StabilizeResult {
    bool stabilized = false;
    CoverState state;
    std::vector<StepRecord> trace;
    int blowups = 0;
    int saturations = 0;
};

// The stabilization loop (two sheets only): normalize, then repeatedly
// take the minimal sub-1 copy (smallest divisor id, then sheet, on ties);
// saturate it when unobstructed, otherwise blow up the smallest live
// crossing of its image with the smallest obstructor's image.  Stops when
// no sub-1 copy remains (verifying that BP then holds at every crossing
// and that the divisorial b-divisor equals the codiscrepancy b-divisor of
// its trace to `check_depth`), or when `cap` blowups+saturations have run
// (stabilized = false; the expected outcome for Q-independent irrational
// multiplicities).  Punctured states can abort via SaturationIllegal.
StabilizeResult stabilize(const CoverState& st, int cap, int check_depth = 3);

struct EuclidResult {
    bool terminated = false;
    int steps = 0;
};

// Subtractive-Euclid termination oracle on a pair of positive values:
// steps until the pair becomes equal.  The blowup loop's sub-1
// co-multiplicities follow exactly this recursion, so its blowup count is
// steps + 1 on two-divisor configurations.
EuclidResult euclid_oracle(const ExtReal& alpha, const ExtReal& beta, int cap);

}  // namespace adjlab
