#pragma once

#include <map>
#include <string>
#include <vector>

#include "adjlab/ext_real.hpp"

namespace adjlab {

// One branch of a covering over a base point: covering multiplicity m and
// the divisor multiplicity d at the upstairs point.  Characteristic-0
// convention: the ramification index is always m - 1 and is not stored.
// `point` optionally names the upstairs point so towers can be glued.
struct BranchData {
    long m = 1;
    ExtReal d;
    std::string point;
};

struct FiberData {
    std::vector<BranchData> branches;  // nonempty
};

// A finite covering of curves together with a divisor upstairs, recorded
// fiberwise over finitely many marked base points.  Unmarked base points are
// implicit etale fibers (degree many branches, m = 1, d = 0) and are never
// materialized.
struct CurveCover {
    long degree = 1;
    std::map<std::string, FiberData> fibers;  // base point id -> fiber
};

// Throws InputError on malformed data: branch multiplicities < 1, empty
// fibers, fiber degree sums differing from the declared degree, or a
// non-empty upstairs point label used twice.
void validate(const CurveCover& cover);

// Discriminant multiplicity over the fiber's base point:
// max over branches of (m - 1 + d) / m.
ExtReal discriminant_mult(const FiberData& fiber);

// The same value from the threshold characterization: 1 - t where t is the
// largest value with d_i + t*m_i <= 1 for every branch.  Demands d_i <= 1
// (throws NotGLC otherwise); subboundaries are fine for the closed formula
// but the threshold reading needs log canonicity.
ExtReal discriminant_mult_oracle(const FiberData& fiber);

// Multiplicity of the moduli part at the branch point, given the
// discriminant multiplicity d_prime of the branch's fiber:
// d + m - 1 - m*d_prime.
ExtReal moduli_mult(const BranchData& branch, const ExtReal& d_prime);

// Branch data whose discriminant multiplicity is exactly d_base:
// d_i = m_i*d_base - (m_i - 1).  Results may be negative (subboundaries).
FiberData crepant_pullback(const std::vector<long>& fiber_shape,
                           const ExtReal& d_base);

// Composite of X -> Y (upper) and Y -> Z (lower).  Lower branches whose
// `point` label names a marked point of the upper cover are expanded through
// that fiber (m multiplies, d comes from upstairs); other branches get etale
// upper fibers.  Marked upper points lying over no labeled lower branch are
// placed over fresh unmarked base points named after them.  The lower
// cover's own d values play no role here: in a tower the boundary on the
// middle curve is the induced one.  Throws TowerMismatch on inconsistent
// incidence (duplicate labels, name collisions).
CurveCover compose_towers(const CurveCover& upper, const CurveCover& lower);

struct CheckReport {
    bool ok = true;
    std::string witness;  // first failing point when !ok
};

// Discriminant of the composite equals the discriminant of the lower cover
// with the induced boundary (upper discriminants) on the middle curve,
// over every marked base point.
CheckReport transitivity_check(const CurveCover& upper,
                               const CurveCover& lower);

// At every upstairs point of the composite tower:
// moduli(X/Z) = moduli(X/Y) + m_upper * moduli(Y/Z at the image point),
// where Y carries the induced boundary.
CheckReport moduli_additivity_check(const CurveCover& upper,
                                    const CurveCover& lower);

// All d_i <= 1 (resp. < 1); equivalent to the discriminant multiplicity
// being <= 1 (resp. < 1).
bool lc_over_point(const FiberData& fiber);
bool klt_over_point(const FiberData& fiber);

}  // namespace adjlab
