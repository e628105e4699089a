#include "adjlab/curves.hpp"

#include <set>

#include "adjlab/errors.hpp"

namespace adjlab {

void validate(const CurveCover& cover) {
    if (cover.degree < 1) throw InputError("covering degree must be >= 1");
    std::set<std::string> labels;
    for (const auto& [base, fiber] : cover.fibers) {
        if (fiber.branches.empty())
            throw InputError("fiber over \"" + base + "\" has no branches");
        long total = 0;
        for (const auto& br : fiber.branches) {
            if (br.m < 1)
                throw InputError("branch multiplicity must be >= 1 over \"" +
                                 base + "\"");
            total += br.m;
            if (!br.point.empty() && !labels.insert(br.point).second)
                throw InputError("upstairs point \"" + br.point +
                                 "\" appears twice");
        }
        if (total != cover.degree)
            throw InputError("fiber over \"" + base + "\" sums to " +
                             std::to_string(total) + ", expected degree " +
                             std::to_string(cover.degree));
    }
}

ExtReal discriminant_mult(const FiberData& fiber) {
    if (fiber.branches.empty()) throw InputError("fiber has no branches");
    bool first = true;
    ExtReal best;
    for (const auto& br : fiber.branches) {
        if (br.m < 1) throw InputError("branch multiplicity must be >= 1");
        ExtReal v = Rat(1, br.m) * (ExtReal(br.m - 1) + br.d);
        if (first || v > best) {
            best = v;
            first = false;
        }
    }
    return best;
}

ExtReal discriminant_mult_oracle(const FiberData& fiber) {
    if (fiber.branches.empty()) throw InputError("fiber has no branches");
    // Largest t such that every branch keeps d + t*m <= 1; per branch the
    // bound is (1 - d)/m, so t is the minimum of those.
    bool first = true;
    ExtReal t;
    for (const auto& br : fiber.branches) {
        if (br.m < 1) throw InputError("branch multiplicity must be >= 1");
        if (br.d > ExtReal(1))
            throw NotGLC("branch multiplicity " + br.d.str() + " exceeds 1");
        ExtReal cand = Rat(1, br.m) * (ExtReal(1) - br.d);
        if (first || cand < t) {
            t = cand;
            first = false;
        }
    }
    return ExtReal(1) - t;
}

ExtReal moduli_mult(const BranchData& branch, const ExtReal& d_prime) {
    return branch.d + ExtReal(branch.m - 1) - Rat(branch.m) * d_prime;
}

FiberData crepant_pullback(const std::vector<long>& fiber_shape,
                           const ExtReal& d_base) {
    FiberData out;
    for (long m : fiber_shape) {
        if (m < 1) throw InputError("branch multiplicity must be >= 1");
        out.branches.push_back(
            BranchData{m, Rat(m) * d_base - ExtReal(m - 1), std::string()});
    }
    return out;
}

namespace {

// Boundary induced on the middle curve at a lower branch point: the upper
// discriminant when the point is marked upstairs, 0 (etale) otherwise.
ExtReal induced_d(const CurveCover& upper, const BranchData& lower_branch) {
    if (!lower_branch.point.empty()) {
        auto it = upper.fibers.find(lower_branch.point);
        if (it != upper.fibers.end()) return discriminant_mult(it->second);
    }
    return ExtReal(0);
}

std::vector<BranchData> upper_branches_over(const CurveCover& upper,
                                            const BranchData& lower_branch) {
    if (!lower_branch.point.empty()) {
        auto it = upper.fibers.find(lower_branch.point);
        if (it != upper.fibers.end()) return it->second.branches;
    }
    return std::vector<BranchData>(static_cast<size_t>(upper.degree),
                                   BranchData{1, ExtReal(0), std::string()});
}

FiberData composite_fiber(const CurveCover& upper,
                          const FiberData& lower_fiber) {
    FiberData out;
    for (const auto& br : lower_fiber.branches) {
        for (const auto& ub : upper_branches_over(upper, br))
            out.branches.push_back(BranchData{ub.m * br.m, ub.d, ub.point});
    }
    return out;
}

// Composite fiber over the fresh base point carrying an unconsumed marked
// upper point: the image point is etale in the lower cover.
FiberData fresh_composite(const CurveCover& upper, const CurveCover& lower,
                          const FiberData& upper_fiber) {
    FiberData out = upper_fiber;
    for (long i = 1; i < lower.degree; ++i)
        for (long j = 0; j < upper.degree; ++j)
            out.branches.push_back(BranchData{1, ExtReal(0), std::string()});
    return out;
}

std::set<std::string> consumed_upper_points(const CurveCover& upper,
                                            const CurveCover& lower) {
    std::set<std::string> consumed;
    for (const auto& [base, fiber] : lower.fibers)
        for (const auto& br : fiber.branches)
            if (!br.point.empty() && upper.fibers.count(br.point))
                consumed.insert(br.point);
    return consumed;
}

}  // namespace

CurveCover compose_towers(const CurveCover& upper, const CurveCover& lower) {
    validate(upper);
    validate(lower);
    CurveCover out;
    out.degree = upper.degree * lower.degree;
    for (const auto& [base, fiber] : lower.fibers)
        out.fibers.emplace(base, composite_fiber(upper, fiber));
    std::set<std::string> consumed = consumed_upper_points(upper, lower);
    for (const auto& [y, fiber] : upper.fibers) {
        if (consumed.count(y)) continue;
        if (lower.fibers.count(y))
            throw TowerMismatch("upper point \"" + y +
                                "\" is not over any lower branch but reuses "
                                "a lower base point name");
        out.fibers.emplace(y, fresh_composite(upper, lower, fiber));
    }
    validate(out);
    return out;
}

CheckReport transitivity_check(const CurveCover& upper,
                               const CurveCover& lower) {
    validate(upper);
    validate(lower);
    CheckReport rep;
    auto mismatch = [&rep](const std::string& base, const ExtReal& comp,
                           const ExtReal& ind) {
        rep.ok = false;
        rep.witness = "over \"" + base + "\": composite route " + comp.str() +
                      " vs induced route " + ind.str();
    };
    for (const auto& [base, fiber] : lower.fibers) {
        FiberData induced;
        for (const auto& br : fiber.branches)
            induced.branches.push_back(
                BranchData{br.m, induced_d(upper, br), br.point});
        ExtReal a = discriminant_mult(composite_fiber(upper, fiber));
        ExtReal b = discriminant_mult(induced);
        if (a != b) {
            mismatch(base, a, b);
            return rep;
        }
    }
    std::set<std::string> consumed = consumed_upper_points(upper, lower);
    for (const auto& [y, fiber] : upper.fibers) {
        if (consumed.count(y)) continue;
        FiberData induced;
        induced.branches.push_back(
            BranchData{1, discriminant_mult(fiber), y});
        for (long i = 1; i < lower.degree; ++i)
            induced.branches.push_back(BranchData{1, ExtReal(0), std::string()});
        ExtReal a = discriminant_mult(fresh_composite(upper, lower, fiber));
        ExtReal b = discriminant_mult(induced);
        if (a != b) {
            mismatch(y, a, b);
            return rep;
        }
    }
    return rep;
}

CheckReport moduli_additivity_check(const CurveCover& upper,
                                    const CurveCover& lower) {
    validate(upper);
    validate(lower);
    CheckReport rep;
    // One middle point: multiplicity m_l over the base, induced boundary dY,
    // fiber discriminant dZ downstairs, and the upper branches over it.
    auto check_group = [&rep](const std::string& base, const std::string& mid,
                              long m_l, const ExtReal& dY, const ExtReal& dZ,
                              const std::vector<BranchData>& ups) -> bool {
        for (size_t i = 0; i < ups.size(); ++i) {
            const auto& ub = ups[i];
            BranchData comp{ub.m * m_l, ub.d, ub.point};
            BranchData middle{m_l, dY, mid};
            ExtReal lhs = moduli_mult(comp, dZ);
            ExtReal rhs =
                moduli_mult(ub, dY) + Rat(ub.m) * moduli_mult(middle, dZ);
            if (lhs != rhs) {
                rep.ok = false;
                rep.witness = "over \"" + base + "\" via \"" +
                              (mid.empty() ? "<etale>" : mid) + "\" branch #" +
                              std::to_string(i) + ": " + lhs.str() +
                              " vs " + rhs.str();
                return false;
            }
        }
        return true;
    };
    for (const auto& [base, fiber] : lower.fibers) {
        ExtReal dZ = discriminant_mult(composite_fiber(upper, fiber));
        for (const auto& br : fiber.branches) {
            if (!check_group(base, br.point, br.m, induced_d(upper, br), dZ,
                             upper_branches_over(upper, br)))
                return rep;
        }
    }
    std::set<std::string> consumed = consumed_upper_points(upper, lower);
    for (const auto& [y, fiber] : upper.fibers) {
        if (consumed.count(y)) continue;
        ExtReal dZ = discriminant_mult(fresh_composite(upper, lower, fiber));
        if (!check_group(y, y, 1, discriminant_mult(fiber), dZ,
                         fiber.branches))
            return rep;
        std::vector<BranchData> etale(
            static_cast<size_t>(upper.degree),
            BranchData{1, ExtReal(0), std::string()});
        for (long i = 1; i < lower.degree; ++i)
            if (!check_group(y, std::string(), 1, ExtReal(0), dZ, etale))
                return rep;
    }
    return rep;
}

bool lc_over_point(const FiberData& fiber) {
    for (const auto& br : fiber.branches)
        if (br.d > ExtReal(1)) return false;
    return true;
}

bool klt_over_point(const FiberData& fiber) {
    for (const auto& br : fiber.branches)
        if (br.d >= ExtReal(1)) return false;
    return true;
}

}  // namespace adjlab
