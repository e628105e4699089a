#include "doctest.h"

#include <cstdint>
#include <numeric>
#include <sstream>

#include "adjlab/cover.hpp"
#include "adjlab/errors.hpp"

using namespace adjlab;

namespace {

Rat q(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

struct Lcg {
    std::uint64_t s;
    std::uint64_t next() {
        s = s * 6364136223846793005ULL + 1442695040888963407ULL;
        return s;
    }
    long range(long lo, long hi) {
        return lo + static_cast<long>(next() % (hi - lo + 1));
    }
};

SncModel two_curves() {
    SncModel m;
    add_divisor(m, "C1");
    add_divisor(m, "C2");
    add_crossing(m, "p", 0, 1);
    return m;
}

// The standard double-cover configuration: two curves through one point,
// each copy reduced on one sheet and carrying d on the other (opposite
// sheets, so the minima sit apart).
CoverState pair_state(const ExtReal& d1, const ExtReal& d2) {
    SncModel m = two_curves();
    return make_cover(std::move(m), 2, {0, 1},
                      {{0, {d1, ExtReal(1)}}, {1, {ExtReal(1), d2}}});
}

// One curve with two marked free points; sheet 0 carries the curve with
// multiplicity 1, sheet 1 with 0.
CoverState line_state() {
    SncModel m;
    add_divisor(m, "C");
    declare_free_point(m, "p", 0);
    declare_free_point(m, "q", 0);
    return make_cover(std::move(m), 2, {0}, {{0, {ExtReal(1), ExtReal(0)}}});
}

std::string trace_summary(const StabilizeResult& res) {
    std::ostringstream os;
    for (const auto& rec : res.trace) {
        switch (rec.kind) {
            case StepKind::Normalization: os << "N(" << rec.location << ")"; break;
            case StepKind::Saturation:
                os << "S(" << rec.location << ",s" << rec.sheet << ")";
                break;
            case StepKind::Blowup: os << "B(" << rec.location << ")"; break;
        }
    }
    return os.str();
}

bool lex_less(const Measure& a, const Measure& b) {
    if (a.scaled_comult != b.scaled_comult) return a.scaled_comult < b.scaled_comult;
    if (a.count_at_min != b.count_at_min) return a.count_at_min < b.count_at_min;
    return a.bad_pairs < b.bad_pairs;
}

}  // namespace

TEST_CASE("cover construction and validation") {
    CoverState st = pair_state(ExtReal(q(3, 4)), ExtReal(q(1, 2)));
    CHECK(st.sheets == 2);
    CHECK(ddiv_mult_at(st, 0) == ExtReal(1));
    CHECK(ddiv_mult_at(st, 1) == ExtReal(1));
    CHECK(is_normalized(st));

    SncModel m = two_curves();
    // multiplicity above 1 is rejected
    CHECK_THROWS_AS(make_cover(m, 2, {0, 1},
                               {{0, {ExtReal(2), ExtReal(1)}},
                                {1, {ExtReal(1), ExtReal(1)}}}),
                    NotGLC);
    // nonzero multiplicity outside the boundary is rejected
    CHECK_THROWS_AS(
        make_cover(m, 2, {0}, {{1, {ExtReal(q(1, 2)), ExtReal(0)}}}),
        InputError);
    // one entry per sheet
    CHECK_THROWS_AS(make_cover(m, 2, {0}, {{0, {ExtReal(1)}}}), InputError);
    CHECK_THROWS_AS(make_cover(m, 2, {0}, {{7, {ExtReal(0), ExtReal(0)}}}),
                    InputError);

    // zero mults off the boundary are fine, and three sheets work
    CoverState three = make_cover(m, 3, {0},
                                  {{0, {ExtReal(1), ExtReal(q(1, 3)), ExtReal(0)}}});
    CHECK(ddiv_mult_at(three, 0) == ExtReal(1));
    CHECK(ddiv_mult_at(three, 1) == ExtReal(0));
}

TEST_CASE("divisorial multiplicity at points is the sheetwise max") {
    CoverState st = pair_state(ExtReal(q(3, 4)), ExtReal(q(1, 2)));
    // sheet 0: 3/4 + 1 - 1 = 3/4, sheet 1: 1 + 1/2 - 1 = 1/2
    CHECK(ddiv_mult_at(st, "p") == ExtReal(q(3, 4)));
    CHECK_THROWS_AS(ddiv_mult_at(st, "nowhere"), NoSuchPoint);

    // free point on C1: max over sheets of (mult - 1)
    SncModel m = two_curves();
    declare_free_point(m, "f", 0);
    declare_off_point(m, "o");
    CoverState st2 = make_cover(std::move(m), 2, {0, 1},
                                {{0, {ExtReal(q(3, 4)), ExtReal(1)}},
                                 {1, {ExtReal(1), ExtReal(q(1, 2))}}});
    CHECK(ddiv_mult_at(st2, "f") == ExtReal(0));
    CHECK(ddiv_mult_at(st2, "o") == ExtReal(-1));
}

TEST_CASE("local max test flags exactly the split-minima crossings") {
    // With copies (a0, a1) on C1 and (b0, b1) on C2, the test holds at the
    // crossing iff one sheet attains both maxima.
    const Rat pool[] = {q(0, 1), q(1, 4), q(1, 2), q(2, 3), q(1, 1)};
    for (const Rat& a0 : pool)
        for (const Rat& a1 : pool)
            for (const Rat& b0 : pool)
                for (const Rat& b1 : pool) {
                    SncModel m = two_curves();
                    CoverState st = make_cover(
                        std::move(m), 2, {0, 1},
                        {{0, {ExtReal(a0), ExtReal(a1)}},
                         {1, {ExtReal(b0), ExtReal(b1)}}});
                    Rat amax = std::max(a0, a1);
                    Rat bmax = std::max(b0, b1);
                    bool shared = (a0 == amax && b0 == bmax) ||
                                  (a1 == amax && b1 == bmax);
                    CHECK(bp_local_ok(st, "p") == shared);
                }
    CoverState st = pair_state(ExtReal(q(3, 4)), ExtReal(q(1, 2)));
    CHECK_THROWS_AS(bp_local_ok(st, "missing"), NoSuchPoint);
    SncModel m = two_curves();
    declare_free_point(m, "f", 0);
    CoverState st2 = make_cover(std::move(m), 2, {0, 1}, {});
    CHECK_THROWS_AS(bp_local_ok(st2, "f"), InputError);
}

TEST_CASE("free and off points never break the one-divisor max identity") {
    // Without punctures, max_s(u_s) - 1 is both the actual exceptional
    // value and the prediction from the downstairs trace, for any state.
    Lcg rng{20260826u};
    for (int rep = 0; rep < 40; ++rep) {
        SncModel m;
        add_divisor(m, "C1");
        add_divisor(m, "C2");
        add_crossing(m, "p", 0, 1);
        declare_free_point(m, "f", rng.range(0, 1));
        declare_off_point(m, "o");
        std::map<DivId, std::vector<ExtReal>> mults;
        for (DivId d = 0; d < 2; ++d) {
            ExtReal hi(1);
            ExtReal lo(q(rng.range(0, 7), 8));
            if (rng.range(0, 1))
                mults[d] = {hi, lo};
            else
                mults[d] = {lo, hi};
        }
        CoverState st = make_cover(std::move(m), 2, {0, 1}, mults);
        const PointInfo& f = point_info(st.base, "f");
        ExtReal expected = ddiv_mult_at(st, f.on[0]) - ExtReal(1);
        CHECK(ddiv_mult_at(st, "f") == expected);
        CHECK(ddiv_mult_at(st, "o") == ExtReal(-1));
    }
}

TEST_CASE("normalization tops out every boundary divisor") {
    SncModel m = two_curves();
    CoverState raw = make_cover(std::move(m), 2, {0, 1},
                                {{0, {ExtReal(q(1, 2)), ExtReal(q(3, 4))}},
                                 {1, {ExtReal(q(1, 4)), ExtReal(0)}}});
    CHECK_FALSE(is_normalized(raw));
    auto [st, recs] = normalize(raw);
    CHECK(is_normalized(st));
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].kind == StepKind::Normalization);
    CHECK(recs[0].location == "C1");
    CHECK(recs[0].shift == ExtReal(q(1, 4)));
    CHECK(st.up.at(0)[0].mult == ExtReal(q(3, 4)));
    CHECK(st.up.at(0)[1].mult == ExtReal(1));
    CHECK(recs[1].location == "C2");
    CHECK(recs[1].shift == ExtReal(q(3, 4)));
    CHECK(st.up.at(1)[0].mult == ExtReal(1));
    CHECK(st.up.at(1)[1].mult == ExtReal(q(3, 4)));
    // already-normalized states pass through untouched
    auto [again, recs2] = normalize(st);
    CHECK(recs2.empty());
    CHECK(ddiv_trace(again).mult == ddiv_trace(st).mult);
}

TEST_CASE("normalization shifts the b-divisor by a pullback closure") {
    // The expansion of the normalized state equals the raw expansion plus
    // the closure of the added boundary divisor, node by node; in
    // particular the local max test is unaffected.
    Lcg rng{97531u};
    for (int rep = 0; rep < 25; ++rep) {
        SncModel m = two_curves();
        std::map<DivId, std::vector<ExtReal>> mults;
        for (DivId d = 0; d < 2; ++d)
            mults[d] = {ExtReal(q(rng.range(0, 8), 8)),
                        ExtReal(q(rng.range(0, 8), 8))};
        CoverState raw = make_cover(std::move(m), 2, {0, 1}, mults);
        auto [st, recs] = normalize(raw);
        std::map<std::string, Rat> added{{"C1", Rat(0)}, {"C2", Rat(0)}};
        for (const auto& rec : recs)
            added[rec.location] = rec.shift.as_rational();
        const int depth = 3;
        BDivExpansion before = ddiv_bdiv(raw, depth);
        BDivExpansion after = ddiv_bdiv(st, depth);
        BDivExpansion closure =
            pullback_closure(raw.base, trace_of(raw.base, added), depth);
        for (const auto& [id, val] : after.trace.mult)
            CHECK(val == before.trace.mult.at(id) + closure.trace.mult.at(id));
        CHECK(bp_local_ok(raw, "p") == bp_local_ok(st, "p"));
    }
}

TEST_CASE("crepant cover blowup records per-sheet values") {
    CoverState st = pair_state(ExtReal(q(3, 4)), ExtReal(q(1, 2)));
    auto [st2, e] = cover_blow_up(st, "p");
    CHECK(st2.base.divisors[(size_t)e].name == "E1");
    CHECK(st2.up.at(e)[0].present);
    CHECK(st2.up.at(e)[0].mult == ExtReal(q(3, 4)));
    CHECK(st2.up.at(e)[1].mult == ExtReal(q(1, 2)));
    // not renormalized and not part of the boundary
    CHECK(st2.boundary.count(e) == 0);
    CHECK(ddiv_mult_at(st2, e) == ExtReal(q(3, 4)));
    // the original state is untouched
    CHECK(st.base.points.count("p") == 1);
}

TEST_CASE("punctures thin fibers and can empty them") {
    CoverState st = pair_state(ExtReal(q(3, 4)), ExtReal(q(1, 2)));
    puncture(st, 0, "p");
    // only sheet 1 is left over p
    CHECK(ddiv_mult_at(st, "p") == ExtReal(q(1, 2)));
    auto [st2, e] = cover_blow_up(st, "p");
    CHECK_FALSE(st2.up.at(e)[0].present);
    CHECK(st2.up.at(e)[1].mult == ExtReal(q(1, 2)));
    // deadness propagated to the fresh crossings
    CHECK(st2.dead.at("p/C1") == std::set<int>{0});
    CHECK(st2.dead.at("p/C2") == std::set<int>{0});
    CHECK(ddiv_mult_at(st2, e) == ExtReal(q(1, 2)));

    puncture(st, 1, "p");
    CHECK_THROWS_AS(ddiv_mult_at(st, "p"), EmptyFiber);
    CHECK_THROWS_AS(cover_blow_up(st, "p"), EmptyFiber);
    CHECK_THROWS_AS(ddiv_bdiv(st, 2), EmptyFiber);
    CHECK_THROWS_AS(puncture(st, 2, "p"), InputError);
    CHECK_THROWS_AS(puncture(st, 0, "nowhere"), NoSuchPoint);
}

TEST_CASE("expansion matches the codiscrepancy recursion sheet by sheet") {
    // With both boundary copies reduced on the same sheet, that sheet
    // dominates every node, so the expansion is the codiscrepancy
    // b-divisor of the trace.
    SncModel m = two_curves();
    CoverState st = make_cover(std::move(m), 2, {0, 1},
                               {{0, {ExtReal(1), ExtReal(q(1, 2))}},
                                {1, {ExtReal(1), ExtReal(q(1, 3))}}});
    const int depth = 3;
    BDivExpansion mine = ddiv_bdiv(st, depth);
    BDivExpansion ref = codiscrepancy_bdiv(st.base, ddiv_trace(st), depth);
    BDivCompare cmp = bdiv_equal(mine, ref);
    CHECK(cmp.equal);

    // Split minima break the agreement at the very first exceptional.
    CoverState split = pair_state(ExtReal(q(3, 4)), ExtReal(q(1, 2)));
    BDivCompare cmp2 = bdiv_equal(ddiv_bdiv(split, 1),
                                  codiscrepancy_bdiv(split.base,
                                                     ddiv_trace(split), 1));
    CHECK_FALSE(cmp2.equal);
    CHECK(cmp2.divergence.find("E1") != std::string::npos);
}

TEST_CASE("saturation requires a clear line of sight") {
    CoverState st = pair_state(ExtReal(q(3, 4)), ExtReal(q(1, 2)));
    // (C2, sheet 1) is blocked by (C1, sheet 0): disjoint upstairs, images
    // crossing at p
    auto obs = obstructors_of(st, 1, 1);
    REQUIRE(obs.size() == 1);
    CHECK(obs[0].div == 0);
    CHECK(obs[0].sheet == 0);
    CHECK_THROWS_AS(saturate(st, 1, 1), SaturationIllegal);

    // the reduced copy cannot be saturated again
    CHECK_THROWS_AS(saturate(st, 0, 1), SaturationIllegal);
    // and bad targets are input errors
    CHECK_THROWS_AS(saturate(st, 0, 5), InputError);
    CoverState off = pair_state(ExtReal(q(3, 4)), ExtReal(q(1, 2)));
    off.boundary.erase(1);
    off.up.at(1) = {SheetCopy{true, ExtReal(0)}, SheetCopy{true, ExtReal(0)}};
    CHECK_THROWS_AS(saturate(off, 1, 0), InputError);

    // same-sheet neighbours do not obstruct: both sub-1 copies sit on
    // sheet 0 and share the crossing there
    SncModel m = two_curves();
    CoverState same = make_cover(std::move(m), 2, {0, 1},
                                 {{0, {ExtReal(q(3, 4)), ExtReal(1)}},
                                  {1, {ExtReal(q(1, 2)), ExtReal(1)}}});
    CHECK(obstructors_of(same, 0, 0).empty());
    auto [sat, rec] = saturate(same, 0, 0);
    CHECK(sat.up.at(0)[0].mult == ExtReal(1));
    CHECK(rec.kind == StepKind::Saturation);
    CHECK(rec.shift == ExtReal(q(1, 4)));
    // the divisorial b-divisor did not move (checked again here, against
    // the full expansion)
    BDivCompare cmp = bdiv_equal(ddiv_bdiv(same, 3), ddiv_bdiv(sat, 3));
    CHECK(cmp.equal);
}

TEST_CASE("saturation refuses when the expansion would move") {
    // Punctured configuration: C carries (1, 0), the point p on C is dead
    // on sheet 0, and the blowup of p has been materialized.  The copy
    // (C, sheet 1) has no combinatorial obstructor, yet raising it to 1
    // changes the expansion over p, and the depth check catches it.
    CoverState st = line_state();
    puncture(st, 0, "p");
    auto [blown, e] = cover_blow_up(st, "p");
    CHECK(is_normalized(blown));
    CHECK(obstructors_of(blown, 0, 1).empty());
    CHECK_THROWS_AS(saturate(blown, 0, 1), SaturationIllegal);
    // disabling the check shows what it protects against
    auto [forced, rec] = saturate(blown, 0, 1, 0);
    CHECK(forced.up.at(0)[1].mult == ExtReal(1));
    BDivCompare cmp = bdiv_equal(ddiv_bdiv(blown, 2), ddiv_bdiv(forced, 2));
    CHECK_FALSE(cmp.equal);
}

TEST_CASE("blowup step renormalizes the exceptional into the boundary") {
    CoverState st = pair_state(ExtReal(q(3, 4)), ExtReal(q(1, 2)));
    auto [st2, rec] = blowup_step(st, "p");
    CHECK(rec.kind == StepKind::Blowup);
    CHECK(rec.location == "p");
    REQUIRE(rec.crepant.size() == 2);
    CHECK(*rec.crepant[0] == ExtReal(q(3, 4)));
    CHECK(*rec.crepant[1] == ExtReal(q(1, 2)));
    CHECK(rec.ddiv == ExtReal(q(3, 4)));
    CHECK(rec.shift == ExtReal(q(1, 4)));
    REQUIRE(rec.comult_pair.has_value());
    CHECK(rec.comult_pair->first == ExtReal(q(1, 4)));
    CHECK(rec.comult_pair->second == ExtReal(q(1, 2)));
    DivId e = divisor_by_name(st2.base, "E1");
    CHECK(st2.boundary.count(e) == 1);
    CHECK(st2.up.at(e)[0].mult == ExtReal(1));
    CHECK(st2.up.at(e)[1].mult == ExtReal(q(3, 4)));
    CHECK(is_normalized(st2));
    // blowing a non-crossing or a consumed point fails
    CHECK_THROWS_AS(blowup_step(st2, "p"), NoSuchPoint);
    SncModel m = two_curves();
    declare_free_point(m, "f", 0);
    CoverState st3 = make_cover(std::move(m), 2, {0, 1}, {});
    CHECK_THROWS_AS(blowup_step(st3, "f"), InputError);
    // and a non-normalized state is rejected outright
    SncModel m2 = two_curves();
    CoverState low = make_cover(std::move(m2), 2, {0, 1},
                                {{0, {ExtReal(q(1, 2)), ExtReal(q(1, 2))}},
                                 {1, {ExtReal(1), ExtReal(1)}}});
    CHECK_THROWS_AS(blowup_step(low, "p"), InputError);
}

TEST_CASE("stabilization follows the worked rational run") {
    CoverState st = pair_state(ExtReal(q(3, 4)), ExtReal(q(1, 2)));
    StabilizeResult res = stabilize(st, 100);
    CHECK(res.stabilized);
    CHECK(res.blowups == 2);
    CHECK(res.saturations == 3);
    CHECK(trace_summary(res) == "B(p)S(C2,s1)B(p/C1)S(C1,s0)S(E1,s1)");

    // step 1: blowup at p with crepant (3/4, 1/2), shift 1/4
    const StepRecord& b1 = res.trace[0];
    CHECK(b1.ddiv == ExtReal(q(3, 4)));
    CHECK(b1.shift == ExtReal(q(1, 4)));
    CHECK(*b1.crepant[0] == ExtReal(q(3, 4)));
    CHECK(*b1.crepant[1] == ExtReal(q(1, 2)));
    CHECK(b1.comult_pair->first == ExtReal(q(1, 4)));
    CHECK(b1.comult_pair->second == ExtReal(q(1, 2)));
    // step 3: blowup at p/C1 with equal crepant values 3/4
    const StepRecord& b2 = res.trace[2];
    CHECK(*b2.crepant[0] == ExtReal(q(3, 4)));
    CHECK(*b2.crepant[1] == ExtReal(q(3, 4)));
    CHECK(b2.shift == ExtReal(q(1, 4)));
    CHECK(b2.comult_pair->first == ExtReal(q(1, 4)));
    CHECK(b2.comult_pair->second == ExtReal(q(1, 4)));

    // the final state is fully reduced
    for (DivId d : res.state.boundary)
        CHECK(ddiv_mult_at(res.state, d) == ExtReal(1));
    for (const auto& [name, pt] : res.state.base.points)
        if (pt.kind == PointKind::Crossing)
            CHECK(bp_local_ok(res.state, name));

    // the lexicographic measure strictly decreases step by step
    std::vector<Measure> ms;
    for (const auto& rec : res.trace)
        if (rec.measure) ms.push_back(*rec.measure);
    REQUIRE(ms.size() == 5);
    CHECK(ms[0].scaled_comult == Rat(2));  // scale 4, co-multiplicity 1/2
    CHECK(ms[0].count_at_min == 1);
    CHECK(ms[0].bad_pairs == 1);
    for (size_t i = 1; i < ms.size(); ++i) CHECK(lex_less(ms[i], ms[i - 1]));

    // determinism: the same input replays the same trace
    StabilizeResult res2 = stabilize(st, 100);
    CHECK(trace_summary(res2) == trace_summary(res));

    // the blowup count matches the subtractive oracle
    EuclidResult eo = euclid_oracle(ExtReal(q(1, 4)), ExtReal(q(1, 2)), 100);
    CHECK(eo.terminated);
    CHECK(eo.steps == 1);
    CHECK(res.blowups == eo.steps + 1);
}

TEST_CASE("every rational pair on the grid stabilizes") {
    const Rat pool[] = {q(1, 2), q(1, 3), q(2, 3), q(1, 4), q(3, 4),
                        q(2, 5), q(5, 6), q(7, 8)};
    for (const Rat& d1 : pool)
        for (const Rat& d2 : pool) {
            CoverState st = pair_state(ExtReal(d1), ExtReal(d2));
            StabilizeResult res = stabilize(st, 10000);
            CHECK(res.stabilized);
            for (DivId d : res.state.boundary)
                CHECK(ddiv_mult_at(res.state, d) == ExtReal(1));

            // blowups track the subtractive oracle on the co-multiplicities
            EuclidResult eo = euclid_oracle(ExtReal(Rat(1) - d1),
                                            ExtReal(Rat(1) - d2), 10000);
            CHECK(eo.terminated);
            CHECK(res.blowups == eo.steps + 1);

            // denominators never leave the lattice (1/m)Z, m = lcm of the
            // input denominators, and the measure strictly decreases
            mpz_class m = 1;
            mpz_lcm(m.get_mpz_t(), m.get_mpz_t(), d1.get_den().get_mpz_t());
            mpz_lcm(m.get_mpz_t(), m.get_mpz_t(), d2.get_den().get_mpz_t());
            const Measure* prev = nullptr;
            for (const auto& rec : res.trace) {
                for (const auto& e : rec.sub1_after) {
                    REQUIRE(e.mult.is_rational());
                    mpz_class den = e.mult.as_rational().get_den();
                    CHECK(mpz_divisible_p(m.get_mpz_t(), den.get_mpz_t()));
                }
                if (rec.kind == StepKind::Normalization) continue;
                REQUIRE(rec.measure.has_value());
                CHECK(rec.measure->scaled_comult.get_den() == 1);
                if (prev) CHECK(lex_less(*rec.measure, *prev));
                prev = &*rec.measure;
            }
        }
}

TEST_CASE("same-sheet configurations stabilize without blowing up") {
    const Rat pool[] = {q(1, 4), q(1, 2), q(5, 6)};
    for (const Rat& d1 : pool)
        for (const Rat& d2 : pool) {
            SncModel m = two_curves();
            CoverState st = make_cover(std::move(m), 2, {0, 1},
                                       {{0, {ExtReal(d1), ExtReal(1)}},
                                        {1, {ExtReal(d2), ExtReal(1)}}});
            StabilizeResult res = stabilize(st, 100);
            CHECK(res.stabilized);
            CHECK(res.blowups == 0);
            CHECK(res.saturations == 2);
        }
}

TEST_CASE("an irrational independent pair never stabilizes") {
    ContextPtr ctx = GeneratorContext::create();
    ctx->declare_sqrt("sqrt2_half", q(1, 2));   // sqrt(2)/2
    ctx->declare_sqrt("sqrt3_third", q(1, 3));  // sqrt(3)/3
    ExtReal d1 = ExtReal::generator(ctx, "sqrt2_half");
    ExtReal d2 = ExtReal::generator(ctx, "sqrt3_third");

    CoverState st = pair_state(d1, d2);
    StabilizeResult res = stabilize(st, 25);
    CHECK_FALSE(res.stabilized);
    CHECK(res.blowups + res.saturations == 25);
    // the loop settles into blowup/saturation alternation: each blowup
    // frees the previous minimum for saturation but plants a new crossing
    CHECK(res.blowups == 13);
    CHECK(res.saturations == 12);
    // no measures on irrational runs
    for (const auto& rec : res.trace) CHECK_FALSE(rec.measure.has_value());

    // deeper caps only dig deeper
    StabilizeResult res2 = stabilize(st, 60);
    CHECK_FALSE(res2.stabilized);
    CHECK(res2.blowups == 30);
    CHECK(res2.saturations == 30);

    // the subtractive oracle diverges on the matching co-multiplicities
    EuclidResult eo =
        euclid_oracle(ExtReal(1) - d1, ExtReal(1) - d2, 80);
    CHECK_FALSE(eo.terminated);
    CHECK(eo.steps == 80);
    CHECK_THROWS_AS(euclid_oracle(ExtReal(0), d1, 10), InputError);

    // dependent irrationals (equal values) are caught symbolically
    EuclidResult same = euclid_oracle(d1, d1, 10);
    CHECK(same.terminated);
    CHECK(same.steps == 0);
}

TEST_CASE("stabilization caps, preconditions, and rejections") {
    CoverState st = pair_state(ExtReal(q(3, 4)), ExtReal(q(1, 2)));
    StabilizeResult res = stabilize(st, 0);
    CHECK_FALSE(res.stabilized);
    CHECK(res.trace.empty());

    StabilizeResult res1 = stabilize(st, 1);
    CHECK_FALSE(res1.stabilized);
    CHECK(res1.blowups == 1);

    // already-reduced input: stabilized with an empty trace
    SncModel m = two_curves();
    CoverState done = make_cover(std::move(m), 2, {0, 1},
                                 {{0, {ExtReal(1), ExtReal(1)}},
                                  {1, {ExtReal(1), ExtReal(1)}}});
    StabilizeResult res2 = stabilize(done, 5);
    CHECK(res2.stabilized);
    CHECK(res2.trace.empty());

    // non-normalized input gets normalized first, with records
    SncModel m2 = two_curves();
    CoverState raw = make_cover(std::move(m2), 2, {0, 1},
                                {{0, {ExtReal(q(1, 2)), ExtReal(q(3, 4))}},
                                 {1, {ExtReal(1), ExtReal(1)}}});
    StabilizeResult res3 = stabilize(raw, 100);
    CHECK(res3.stabilized);
    CHECK(res3.trace.front().kind == StepKind::Normalization);

    // only double covers are supported by the loop
    SncModel m3 = two_curves();
    CoverState three = make_cover(std::move(m3), 3, {0, 1}, {});
    CHECK_THROWS_AS(stabilize(three, 10), InputError);
}

TEST_CASE("punctured line: the expansion over the dead point drops to the empty boundary") {
    CoverState st = line_state();

    // unpunctured: the exceptional over p gets 1 + (-1)... sheet 0 carries
    // 1 - 1 = 0, sheet 1 carries 0 - 1 = -1; the max 0 agrees with the
    // reduced-boundary codiscrepancy
    CHECK(ddiv_mult_at(st, "p") == ExtReal(0));
    auto [whole, e0] = cover_blow_up(st, "p");
    CHECK(ddiv_mult_at(whole, e0) == ExtReal(0));
    BDivCompare cmp0 = bdiv_equal(ddiv_bdiv(whole, 3),
                                  codiscrepancy_bdiv(whole.base,
                                                     ddiv_trace(whole), 3));
    CHECK(cmp0.equal);

    // puncture p on the sheet carrying the curve
    puncture(st, 0, "p");
    CHECK(ddiv_mult_at(st, "p") == ExtReal(-1));
    CHECK(ddiv_mult_at(st, "q") == ExtReal(0));

    auto [blown, e] = cover_blow_up(st, "p");
    CHECK_FALSE(blown.up.at(e)[0].present);
    CHECK(ddiv_mult_at(blown, e) == ExtReal(-1));
    // the local max test now fails at the crossing over the dead point
    CHECK_FALSE(bp_local_ok(blown, "p/C"));

    // over the dead point the expansion runs the codiscrepancy recursion
    // of the empty boundary: trace C at 0 instead of 1
    const int depth = 3;
    BDivExpansion mine = ddiv_bdiv(blown, depth);
    std::map<std::string, Rat> zeroed{{"C", Rat(0)}, {"E1", Rat(-1)}};
    BDivExpansion empty_side =
        codiscrepancy_bdiv(blown.base, trace_of(blown.base, zeroed), depth);
    for (const auto& dv : mine.model.divisors) {
        if (dv.depth == 0) continue;  // skip C and E1 themselves
        CHECK(mine.trace.mult.at(dv.id) == empty_side.trace.mult.at(dv.id));
    }
    // frozen first two layers: E1 -> -1, then F over E1 x C -> -2
    CHECK(mine.trace.mult.at(e) == ExtReal(-1));
    DivId f = divisor_by_name(mine.model, "E2");
    CHECK(mine.trace.mult.at(f) == ExtReal(-2));

    // over the other marked point nothing changed
    auto [other, g] = cover_blow_up(blown, "q");
    CHECK(ddiv_mult_at(other, g) == ExtReal(0));
    CHECK(ddiv_mult_at(other, divisor_by_name(other.base, "C")) == ExtReal(1));
}
