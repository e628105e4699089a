#include "adjlab/verify.hpp"

#include "adjlab/errors.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "adjlab/dot_export.hpp"
#include "adjlab/json_io.hpp"
#include "adjlab/scenarios.hpp"

namespace adjlab {

namespace {

// Collects the first failure; keeps a running count of successful checks.
struct Tally {
    long checks = 0;
    bool ok = true;
    std::string first;

    void expect(bool cond, const std::string& what) {
        ++checks;
        if (!cond && ok) {
            ok = false;
            first = what;
        }
    }

    CriterionResult result(const std::string& name) const {
        CriterionResult r{name, ok, ""};
        std::ostringstream os;
        if (ok)
            os << checks << " checks";
        else
            os << first;
        r.detail = os.str();
        return r;
    }
};

std::vector<std::vector<long>> partitions(long n) {
    std::vector<std::vector<long>> out;
    std::vector<long> cur;
    std::function<void(long, long)> rec = [&](long rem, long max_part) {
        if (rem == 0) {
            out.push_back(cur);
            return;
        }
        for (long m = std::min(rem, max_part); m >= 1; --m) {
            cur.push_back(m);
            rec(rem - m, m);
            cur.pop_back();
        }
    };
    rec(n, n);
    return out;
}

// Every assignment of pool values to the parts (an odometer).
void for_each_assignment(const std::vector<long>& parts,
                         const std::vector<Rat>& pool,
                         const std::function<void(const FiberData&)>& fn) {
    std::vector<size_t> idx(parts.size(), 0);
    for (;;) {
        FiberData fib;
        for (size_t i = 0; i < parts.size(); ++i)
            fib.branches.push_back(
                BranchData{parts[i], ExtReal(pool[idx[i]]), ""});
        fn(fib);
        size_t k = 0;
        while (k < idx.size()) {
            if (++idx[k] < pool.size()) break;
            idx[k++] = 0;
        }
        if (k == idx.size()) return;
    }
}

std::vector<Rat> d_pool(bool full) {
    if (full)
        return {Rat(0),     Rat(1, 4), Rat(1, 3), Rat(1, 2),
                Rat(2, 3),  Rat(3, 4), Rat(1)};
    return {Rat(0), Rat(1, 2), Rat(1)};
}

std::string fiber_str(const FiberData& fib) {
    std::string s = "[";
    for (const auto& b : fib.branches) {
        if (s.size() > 1) s += ", ";
        s += "(" + std::to_string(b.m) + ", " + b.d.str() + ")";
    }
    return s + "]";
}

// ---- curve-side criteria ----------------------------------------------

CriterionResult check_formula_vs_oracle(bool full) {
    Tally t;
    long max_deg = full ? 6 : 4;
    std::vector<Rat> pool = d_pool(full);
    for (long n = 1; n <= max_deg; ++n)
        for (const auto& parts : partitions(n))
            for_each_assignment(parts, pool, [&](const FiberData& fib) {
                ExtReal a = discriminant_mult(fib);
                ExtReal b = discriminant_mult_oracle(fib);
                t.expect(a == b, "formula " + a.str() + " vs oracle " +
                                     b.str() + " at " + fiber_str(fib));
            });
    return t.result("discriminant formula agrees with the threshold oracle");
}

CriterionResult check_specializations(bool full) {
    Tally t;
    // no boundary: a single branch of multiplicity m contributes (m-1)/m
    for (long m = 1; m <= 6; ++m) {
        FiberData fib{{BranchData{m, ExtReal(Rat(0)), ""}}};
        t.expect(discriminant_mult(fib) == ExtReal(Rat(m - 1, m)),
                 "free branch m=" + std::to_string(m));
    }
    long max_deg = full ? 6 : 4;
    std::vector<Rat> pool = d_pool(full);
    for (long n = 1; n <= max_deg; ++n)
        for (const auto& parts : partitions(n)) {
            long mmax = *std::max_element(parts.begin(), parts.end());
            bool all_equal =
                std::all_of(parts.begin(), parts.end(),
                            [&](long m) { return m == mmax; });
            for (const Rat& d : pool) {
                FiberData fib;
                for (long m : parts)
                    fib.branches.push_back(BranchData{m, ExtReal(d), ""});
                ExtReal dp = discriminant_mult(fib);
                bool zeros = true;
                for (size_t i = 0; i < parts.size(); ++i) {
                    ExtReal mod = moduli_mult(fib.branches[i], dp);
                    Rat part_ratio(parts[i], mmax);
                    part_ratio.canonicalize();
                    ExtReal want(Rat((d - 1) * (1 - part_ratio)));
                    t.expect(mod == want,
                             "equal-boundary moduli at " + fiber_str(fib));
                    t.expect(mod.sign() <= 0,
                             "positive moduli at " + fiber_str(fib));
                    if (mod.sign() != 0) zeros = false;
                }
                // below the log canonical threshold the moduli part
                // vanishes exactly for equal multiplicities; at d = 1 it
                // vanishes identically
                if (d < 1)
                    t.expect(zeros == all_equal,
                             "vanishing pattern at " + fiber_str(fib));
                else
                    t.expect(zeros, "nonzero moduli at d=1, " +
                                        fiber_str(fib));
            }
        }
    return t.result("free and equal-boundary specializations");
}

CriterionResult check_symmetric_vanishing(bool full) {
    Tally t;
    std::vector<Rat> pool = d_pool(full);
    for (long m = 1; m <= 4; ++m)
        for (int count = 1; count <= 3; ++count)
            for (const Rat& d : pool) {
                Scenario sc = example3_galois(m, d, count);
                for (const auto& [pt, mods] : sc.expected.moduli_values)
                    for (const ExtReal& v : mods)
                        t.expect(v.sign() == 0,
                                 "moduli " + v.str() + " for m=" +
                                     std::to_string(m) + " d=" + to_string(d) +
                                     " count=" + std::to_string(count));
                // and the recomputed value agrees
                const FiberData& fib = sc.curve.fibers.at("t");
                ExtReal dp = discriminant_mult(fib);
                for (const auto& b : fib.branches)
                    t.expect(moduli_mult(b, dp).sign() == 0,
                             "recomputed moduli for m=" + std::to_string(m));
            }
    return t.result("identical-branch fibers have vanishing moduli");
}

CriterionResult check_crepant_roundtrip(bool full) {
    Tally t;
    long max_deg = full ? 6 : 4;
    std::vector<Rat> pool = d_pool(full);
    for (long n = 1; n <= max_deg; ++n)
        for (const auto& parts : partitions(n))
            for (const Rat& q : pool) {
                FiberData fib = crepant_pullback(parts, ExtReal(q));
                t.expect(discriminant_mult(fib) == ExtReal(q),
                         "formula round trip, base " + to_string(q));
                t.expect(discriminant_mult_oracle(fib) == ExtReal(q),
                         "oracle round trip, base " + to_string(q));
            }
    return t.result("crepant pullback round-trips the downstairs boundary");
}

CriterionResult check_towers(bool full) {
    Tally t;
    int reps = full ? 200 : 60;
    for (int seed = 1; seed <= reps; ++seed) {
        TowerSample tw = random_tower_sample(
            static_cast<std::uint64_t>(seed), 3, 4, 6);
        CheckReport tr = transitivity_check(tw.upper, tw.lower);
        t.expect(tr.ok, "transitivity, seed " + std::to_string(seed) + ": " +
                            tr.witness);
        CheckReport ad = moduli_additivity_check(tw.upper, tw.lower);
        t.expect(ad.ok, "additivity, seed " + std::to_string(seed) + ": " +
                            ad.witness);
    }
    return t.result("two-level towers: transitivity and moduli additivity");
}

CriterionResult check_disc_calculus(bool full) {
    Tally t;
    long max_deg = full ? 5 : 4;
    std::vector<Rat> pool = d_pool(full);
    std::vector<Rat> shifts = {Rat(1, 4), Rat(1), Rat(-1, 4)};
    for (long n = 1; n <= max_deg; ++n)
        for (const auto& parts : partitions(n))
            for_each_assignment(parts, pool, [&](const FiberData& fib) {
                ExtReal dp = discriminant_mult(fib);
                t.expect(dp.sign() >= 0, "effectiveness at " + fiber_str(fib));
                t.expect(dp.compare(ExtReal(Rat(1))) <= 0,
                         "boundary bound at " + fiber_str(fib));
                t.expect(dp.is_rational(), "rationality at " + fiber_str(fib));
                t.expect(lc_over_point(fib) ==
                             (dp.compare(ExtReal(Rat(1))) <= 0),
                         "lc threshold at " + fiber_str(fib));
                t.expect(klt_over_point(fib) ==
                             (dp.compare(ExtReal(Rat(1))) < 0),
                         "klt threshold at " + fiber_str(fib));
                for (const Rat& s : shifts) {
                    FiberData shifted = fib;
                    for (auto& b : shifted.branches)
                        b.d = b.d + ExtReal(Rat(Rat(b.m) * s));
                    t.expect(discriminant_mult(shifted) ==
                                 dp + ExtReal(s),
                             "shift by " + to_string(s) + " at " +
                                 fiber_str(fib));
                }
            });
    return t.result(
        "discriminant calculus: shifts, effectiveness, rationality, "
        "thresholds");
}

// ---- cover-side criteria ----------------------------------------------

Rat denominator_lcm(const CoverState& st) {
    mpz_class m(1);
    for (const auto& [id, copies] : st.up)
        for (const auto& c : copies) {
            if (!c.present || !c.mult.is_rational()) continue;
            mpz_lcm(m.get_mpz_t(), m.get_mpz_t(),
                    c.mult.as_rational().get_den().get_mpz_t());
        }
    return Rat(m);
}

bool divides(const Rat& den_lcm, const Rat& value) {
    return mpz_divisible_p(den_lcm.get_num().get_mpz_t(),
                           value.get_den().get_mpz_t()) != 0;
}

bool final_state_bp(const CoverState& st, int depth) {
    for (const auto& [name, info] : st.base.points)
        if (info.kind == PointKind::Crossing && !bp_local_ok(st, name))
            return false;
    BDivCompare cmp = bdiv_equal(
        ddiv_bdiv(st, depth),
        codiscrepancy_bdiv(st.base, ddiv_trace(st), depth));
    return cmp.equal;
}

CriterionResult check_rational_stabilization(bool full) {
    Tally t;
    Scenario sc = canned("example5-rational");
    StabilizeResult res = stabilize(sc.cover, sc.cap, 3);
    t.expect(res.stabilized, "worked pair did not stabilize");
    t.expect(res.blowups == 2, "worked pair blowups = " +
                                   std::to_string(res.blowups));
    t.expect(res.saturations == 3, "worked pair saturations = " +
                                       std::to_string(res.saturations));
    EuclidResult eu = euclid_oracle(ExtReal(Rat(1, 4)), ExtReal(Rat(1, 2)),
                                    sc.cap);
    t.expect(eu.terminated && eu.steps + 1 == res.blowups,
             "subtractive gcd step count mismatch");
    t.expect(final_state_bp(res.state, 3),
             "worked pair final state violates the stabilization property");
    int reps = full ? 50 : 12;
    for (int seed = 1; seed <= reps; ++seed) {
        Scenario rc = random_cover(static_cast<std::uint64_t>(seed), 4, 5, 12);
        auto [norm, recs] = normalize(rc.cover);
        Rat m = denominator_lcm(norm);
        StabilizeResult r = stabilize(rc.cover, rc.cap, 3);
        t.expect(r.stabilized,
                 "seed " + std::to_string(seed) + " hit the cap");
        t.expect(sub1_divisors(r.state).empty(),
                 "seed " + std::to_string(seed) + " left sub-1 copies");
        bool denoms_ok = true;
        for (const StepRecord& rec : r.trace)
            for (const Sub1Entry& e : rec.sub1_after)
                if (!divides(m, e.mult.as_rational())) denoms_ok = false;
        for (const auto& [id, copies] : r.state.up)
            for (const auto& c : copies)
                if (c.present && !divides(m, c.mult.as_rational()))
                    denoms_ok = false;
        t.expect(denoms_ok, "seed " + std::to_string(seed) +
                                " produced a denominator outside the lcm");
    }
    return t.result("rational multiplicities stabilize (worked pair + grid)");
}

CriterionResult check_irrational_divergence(bool) {
    Tally t;
    Scenario sc = canned("example5-irrational");
    StabilizeResult res = stabilize(sc.cover, 50, 3);
    t.expect(!res.stabilized, "independent pair stabilized unexpectedly");
    // the co-multiplicity pairs at successive blowups replay the
    // subtractive gcd
    ExtReal a = ExtReal(Rat(1)) - ExtReal::generator(sc.ctx, "sqrt2_half");
    ExtReal b = ExtReal(Rat(1)) - ExtReal::generator(sc.ctx, "sqrt3_third");
    for (const StepRecord& r : res.trace) {
        if (r.kind != StepKind::Blowup) continue;
        if (!r.comult_pair) {
            t.expect(false, "blowup without a co-multiplicity pair");
            break;
        }
        const ExtReal& x = r.comult_pair->first;
        const ExtReal& y = r.comult_pair->second;
        bool same = (x == a && y == b) || (x == b && y == a);
        t.expect(same, "co-multiplicity pair diverged from the gcd replay");
        if (!same) break;
        if (a.compare(b) > 0)
            a = a - b;
        else
            b = b - a;
    }
    // no multiplicity with generator coefficients ever reaches 1
    auto never_one = [&](const ExtReal& v) {
        if (v.is_rational()) return true;
        return v.compare(ExtReal(Rat(1))) != 0;
    };
    bool ok = true;
    for (const StepRecord& r : res.trace) {
        for (const auto& v : r.crepant)
            if (v && !never_one(*v)) ok = false;
        for (const Sub1Entry& e : r.sub1_after)
            if (!never_one(e.mult)) ok = false;
    }
    for (const auto& [id, copies] : res.state.up)
        for (const auto& c : copies)
            if (c.present && !never_one(c.mult)) ok = false;
    t.expect(ok, "an irrational multiplicity reached 1");
    return t.result("independent multiplicities never stabilize");
}

CriterionResult check_first_blowup(bool) {
    Tally t;
    for (const char* name : {"example5-rational", "example5-irrational"}) {
        Scenario sc = canned(name);
        ExtReal d1 = sc.cover.up.at(0)[0].mult;
        ExtReal d2 = sc.cover.up.at(1)[1].mult;
        auto [after, rec] = blowup_step(sc.cover, "p");
        std::string tag = std::string(" (") + name + ")";
        t.expect(rec.crepant.size() == 2 && rec.crepant[0] &&
                     rec.crepant[1] && *rec.crepant[0] == d1 &&
                     *rec.crepant[1] == d2,
                 "crepant multiplicities" + tag);
        t.expect(rec.ddiv == d1, "divisorial value" + tag);
        t.expect(rec.shift == ExtReal(Rat(1)) - d1,
                 "renormalization shift" + tag);
        DivId e = divisor_by_name(after.base, "E1");
        const auto& copies = after.up.at(e);
        t.expect(copies[0].mult == ExtReal(Rat(1)) &&
                     copies[1].mult == ExtReal(Rat(1)) + d2 - d1,
                 "renormalized exceptional multiplicities" + tag);
        t.expect(bp_local_ok(after, "p/C2"), "crossing with C2" + tag);
        t.expect(!bp_local_ok(after, "p/C1"), "crossing with C1" + tag);
    }
    return t.result("first blowup arithmetic at the crossing");
}

CriterionResult check_puncture_degeneration(bool) {
    Tally t;
    // untouched line: both sheets survive everywhere, and the state is
    // stable under every crossing probe
    Scenario plain = canned("example4");
    t.expect(ddiv_mult_at(plain.cover, "p").sign() == 0 &&
                 ddiv_mult_at(plain.cover, "q").sign() == 0,
             "free-point values without puncture");
    {
        auto [blown, e] = cover_blow_up(plain.cover, "p");
        t.expect(final_state_bp(blown, 3),
                 "unpunctured state not stable under the probe");
        t.expect(ddiv_trace(blown).mult.at(divisor_by_name(blown.base, "C")) ==
                     ExtReal(Rat(1)),
                 "curve multiplicity drifted");
    }
    Scenario pun = canned("example4-punctured");
    t.expect(ddiv_mult_at(pun.cover, "p") == ExtReal(Rat(-1)),
             "punctured value over p");
    t.expect(ddiv_mult_at(pun.cover, "q").sign() == 0,
             "punctured value over q");
    {
        auto [blown, e] = cover_blow_up(pun.cover, "p");
        // over the puncture the expansion follows the boundary-free
        // codiscrepancy: the curve's contribution is cut away
        BDivExpansion got = ddiv_bdiv(blown, 3);
        BDivTrace zeroed;
        zeroed.mult[divisor_by_name(blown.base, "C")] = ExtReal(Rat(0));
        zeroed.mult[e] = ExtReal(Rat(-1));
        BDivExpansion want = codiscrepancy_bdiv(blown.base, zeroed, 3);
        bool same = true;
        DivId base_count = static_cast<DivId>(blown.base.divisors.size());
        for (const auto& dv : got.model.divisors) {
            if (dv.id < base_count) continue;
            if (!(got.trace.mult.at(dv.id) == want.trace.mult.at(dv.id)))
                same = false;
        }
        t.expect(same, "expansion over the puncture");
        t.expect(got.trace.mult.at(divisor_by_name(blown.base, "C")) ==
                     ExtReal(Rat(1)),
                 "curve multiplicity over the puncture");
    }
    {
        auto [blown, e] = cover_blow_up(pun.cover, "q");
        // away from the puncture nothing changes
        t.expect(final_state_bp(blown, 3),
                 "state over the untouched point not stable");
        t.expect(ddiv_trace(blown).mult.at(e).sign() == 0,
                 "exceptional over the untouched point");
    }
    return t.result("free-point degeneration with and without a puncture");
}

CriterionResult check_expansion_routes(bool full) {
    Tally t;
    int reps = full ? 100 : 30;
    for (int rep = 1; rep <= reps; ++rep) {
        Lcg64 rng(static_cast<std::uint64_t>(rep) * 7919u);
        SncModel m;
        long nd = rng.range(2, 4);
        std::vector<DivId> ids;
        for (long i = 0; i < nd; ++i)
            ids.push_back(add_divisor(m, "D" + std::to_string(i + 1)));
        long nc = rng.range(1, 4);
        int made = 0;
        for (long k = 0; k < nc; ++k) {
            DivId a = ids[static_cast<size_t>(rng.range(0, nd - 1))];
            DivId b = ids[static_cast<size_t>(rng.range(0, nd - 1))];
            if (a == b) continue;
            add_crossing(m, "x" + std::to_string(k + 1), std::min(a, b),
                         std::max(a, b));
            ++made;
        }
        if (made == 0) add_crossing(m, "x0", ids[0], ids[1]);
        long pre = rng.range(0, 2);
        for (long k = 0; k < pre; ++k) {
            std::vector<std::string> live;
            for (const auto& [name, info] : m.points)
                if (info.kind == PointKind::Crossing) live.push_back(name);
            if (live.empty()) break;
            size_t pick = static_cast<size_t>(
                rng.range(0, static_cast<long>(live.size()) - 1));
            m = blow_up(m, live[pick]).first;
        }
        std::map<std::string, Rat> by_name;
        for (const auto& dv : m.divisors)
            by_name[dv.name] = Rat(rng.range(-8, 8), rng.range(1, 8));
        BDivTrace trace = trace_of(m, by_name);
        try {
            // the expansion recomputes every exceptional through the total
            // transform and throws when the routes disagree
            BDivExpansion e4 = codiscrepancy_bdiv(m, trace, 4);
            // deeper rounds extend the shallow expansion without touching it
            BDivExpansion e2 = codiscrepancy_bdiv(m, trace, 2);
            bool prefix = true;
            for (const auto& dv : e2.model.divisors)
                if (!(e4.trace.mult.at(dv.id) == e2.trace.mult.at(dv.id)))
                    prefix = false;
            t.expect(prefix,
                     "depth truncations differ, rep " + std::to_string(rep));
        } catch (const Error& e) {
            t.expect(false, "route disagreement, rep " + std::to_string(rep) +
                                ": " + e.what());
        }
    }
    return t.result("recursive and total-transform expansions agree");
}

}  // namespace

std::vector<CriterionResult> acceptance_criteria(bool full) {
    std::vector<CriterionResult> out;
    out.push_back(check_formula_vs_oracle(full));
    out.push_back(check_specializations(full));
    out.push_back(check_symmetric_vanishing(full));
    out.push_back(check_crepant_roundtrip(full));
    out.push_back(check_towers(full));
    out.push_back(check_disc_calculus(full));
    out.push_back(check_rational_stabilization(full));
    out.push_back(check_irrational_divergence(full));
    out.push_back(check_first_blowup(full));
    out.push_back(check_puncture_degeneration(full));
    out.push_back(check_expansion_routes(full));
    return out;
}

CriterionResult fixture_roundtrip(const std::string& dir) {
    Tally t;
    for (const std::string& name : canned_names()) {
        std::string path = dir + "/" + name + ".json";
        try {
            Scenario loaded = load_scenario(path);
            t.expect(scenario_to_json(loaded) == scenario_to_json(canned(name)),
                     name + ".json drifted from the built-in scenario");
        } catch (const Error& e) {
            t.expect(false, name + ".json: " + std::string(e.what()));
        }
    }
    return t.result("shipped scenario files match the built-in scenarios");
}

}  // namespace adjlab
