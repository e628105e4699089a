#include "adjlab/scenarios.hpp"

#include <algorithm>

#include "adjlab/errors.hpp"

namespace adjlab {

namespace {

Rat rand_boundary(Lcg64& rng, long den_bound) {
    long den = rng.range(1, den_bound);
    long num = rng.range(0, den);
    Rat q(num, den);
    q.canonicalize();
    return q;
}

FiberData rand_fiber(Lcg64& rng, long degree, long den_bound,
                     int* label_counter) {
    FiberData fib;
    long rem = degree;
    while (rem > 0) {
        BranchData b;
        b.m = rng.range(1, rem);
        b.d = ExtReal(rand_boundary(rng, den_bound));
        if (label_counter && rng.range(0, 1) == 1)
            b.point = "y" + std::to_string(++*label_counter);
        fib.branches.push_back(b);
        rem -= b.m;
    }
    return fib;
}

}  // namespace

Scenario example2(const std::vector<std::pair<long, Rat>>& branches) {
    Scenario sc;
    sc.name = "example2";
    sc.kind = ScenarioKind::Curve;
    FiberData fib;
    long degree = 0;
    for (const auto& [m, d] : branches) {
        fib.branches.push_back(BranchData{m, ExtReal(d), ""});
        degree += m;
    }
    sc.curve.degree = degree;
    sc.curve.fibers["t"] = fib;
    validate(sc.curve);
    ExtReal dp = discriminant_mult_oracle(fib);
    sc.expected.disc_values["t"] = dp;
    std::vector<ExtReal> moduli;
    for (const auto& b : fib.branches) moduli.push_back(moduli_mult(b, dp));
    sc.expected.moduli_values["t"] = moduli;
    sc.expected.note =
        "single-fiber covering; discriminant from the threshold oracle, "
        "moduli from the per-branch defect";
    return sc;
}

Scenario example3_galois(long m, const Rat& d, int count) {
    std::vector<std::pair<long, Rat>> branches(static_cast<size_t>(count),
                                               {m, d});
    Scenario sc = example2(branches);
    sc.name = "example3";
    sc.expected.note =
        "identical branches over the marked point, so the downstairs pair "
        "already accounts for the whole discriminant and every moduli "
        "multiplicity vanishes";
    return sc;
}

Scenario example4(bool punctured) {
    Scenario sc;
    sc.name = punctured ? "example4-punctured" : "example4";
    sc.kind = ScenarioKind::Cover;
    SncModel base;
    DivId c = add_divisor(base, "C");
    declare_free_point(base, "p", c);
    declare_free_point(base, "q", c);
    sc.cover = make_cover(std::move(base), 2, {c},
                          {{c, {ExtReal(Rat(1)), ExtReal(Rat(0))}}});
    if (punctured) puncture(sc.cover, 0, "p");
    sc.cap = 10;
    sc.expected.stabilizes = true;
    sc.expected.blowups = 0;
    sc.expected.saturations = 1;
    sc.expected.point_values["p"] =
        punctured ? ExtReal(Rat(-1)) : ExtReal(Rat(0));
    sc.expected.point_values["q"] = ExtReal(Rat(0));
    sc.expected.note =
        punctured
            ? "removing p's preimage on the sheet carrying C leaves only the "
              "untouched sheet over p, so the exceptional there drops to -1 "
              "while q keeps the two-sheet maximum 0"
            : "both sheets survive over every point of C, so each "
              "exceptional takes the larger sheet value 0";
    return sc;
}

Scenario example5(const ExtReal& d1, const ExtReal& d2) {
    for (const ExtReal* d : {&d1, &d2})
        if (d->compare(ExtReal(Rat(1))) > 0)
            throw InputError("example5 multiplicities must be <= 1");
    Scenario sc;
    sc.kind = ScenarioKind::Cover;
    SncModel base;
    DivId c1 = add_divisor(base, "C1");
    DivId c2 = add_divisor(base, "C2");
    add_crossing(base, "p", c1, c2);
    sc.cover = make_cover(std::move(base), 2, {c1, c2},
                          {{c1, {d1, ExtReal(Rat(1))}},
                           {c2, {ExtReal(Rat(1)), d2}}});
    bool rational = d1.is_rational() && d2.is_rational();
    sc.ctx = d1.context() ? d1.context() : d2.context();
    if (rational) {
        sc.name = "example5-rational";
        sc.cap = 100;
        ExtReal co1 = ExtReal(Rat(1)) - d1;
        ExtReal co2 = ExtReal(Rat(1)) - d2;
        sc.expected.stabilizes = true;
        if (co1.sign() == 0 || co2.sign() == 0) {
            sc.expected.blowups = 0;  // nothing to play the gcd against
        } else {
            EuclidResult eu = euclid_oracle(co1, co2, sc.cap);
            if (eu.terminated) sc.expected.blowups = eu.steps + 1;
        }
        sc.expected.note =
            "rational multiplicities: the co-multiplicity pair runs a "
            "subtractive gcd and the run stops one blowup after it";
    } else {
        sc.name = "example5-irrational";
        sc.cap = 50;
        sc.expected.stabilizes = false;
        sc.expected.note =
            "rationally independent multiplicities: the subtractive "
            "recursion on the co-multiplicities never reaches equality, so "
            "the run hits any cap";
    }
    return sc;
}

Scenario random_cover(std::uint64_t seed, int max_divisors, int max_crossings,
                      long denominator_bound) {
    if (max_divisors < 2 || max_crossings < 1 || denominator_bound < 1)
        throw InputError("random_cover bounds out of range");
    Lcg64 rng(seed);
    Scenario sc;
    sc.name = "random-cover-" + std::to_string(seed);
    sc.kind = ScenarioKind::Cover;
    SncModel base;
    long nd = rng.range(2, max_divisors);
    std::vector<DivId> ids;
    for (long i = 0; i < nd; ++i)
        ids.push_back(add_divisor(base, "D" + std::to_string(i + 1)));
    long nc = rng.range(1, max_crossings);
    int made = 0;
    for (long k = 0; k < nc; ++k) {
        DivId a = ids[static_cast<size_t>(rng.range(0, nd - 1))];
        DivId b = ids[static_cast<size_t>(rng.range(0, nd - 1))];
        if (a == b) continue;
        add_crossing(base, "x" + std::to_string(k + 1), std::min(a, b),
                     std::max(a, b));
        ++made;
    }
    if (made == 0) add_crossing(base, "x0", ids[0], ids[1]);
    std::set<DivId> boundary(ids.begin(), ids.end());
    std::map<DivId, std::vector<ExtReal>> mults;
    for (DivId id : ids)
        mults[id] = {ExtReal(rand_boundary(rng, denominator_bound)),
                     ExtReal(rand_boundary(rng, denominator_bound))};
    sc.cover = make_cover(std::move(base), 2, std::move(boundary), mults);
    sc.cap = 10000;
    sc.expected.stabilizes = true;
    sc.expected.note =
        "all multiplicities rational, so the integer termination measure "
        "forces the run to stop";
    return sc;
}

TowerSample random_tower_sample(std::uint64_t seed, int max_points,
                                long max_degree, long denominator_bound) {
    if (max_points < 1 || max_degree < 1 || denominator_bound < 1)
        throw InputError("random_tower_sample bounds out of range");
    Lcg64 rng(seed);
    TowerSample t;
    t.lower.degree = rng.range(1, max_degree);
    t.upper.degree = rng.range(1, max_degree);
    int labels = 0;
    long np = rng.range(1, max_points);
    for (long i = 0; i < np; ++i)
        t.lower.fibers["z" + std::to_string(i + 1)] =
            rand_fiber(rng, t.lower.degree, denominator_bound, &labels);
    for (int j = 1; j <= labels; ++j) {
        if (rng.range(0, 3) == 0) continue;  // leave this label unramified
        t.upper.fibers["y" + std::to_string(j)] =
            rand_fiber(rng, t.upper.degree, denominator_bound, nullptr);
    }
    if (rng.range(0, 2) == 0)  // a top point over an unmarked middle point
        t.upper.fibers["w"] =
            rand_fiber(rng, t.upper.degree, denominator_bound, nullptr);
    validate(t.lower);
    validate(t.upper);
    t.composite = compose_towers(t.upper, t.lower);
    return t;
}

Scenario random_tower(std::uint64_t seed, int max_points, long max_degree,
                      long denominator_bound) {
    TowerSample t =
        random_tower_sample(seed, max_points, max_degree, denominator_bound);
    Scenario sc;
    sc.name = "random-tower-" + std::to_string(seed);
    sc.kind = ScenarioKind::Curve;
    sc.curve = t.composite;
    for (const auto& [pt, fib] : sc.curve.fibers) {
        ExtReal dp = discriminant_mult_oracle(fib);
        sc.expected.disc_values[pt] = dp;
        std::vector<ExtReal> moduli;
        for (const auto& b : fib.branches) moduli.push_back(moduli_mult(b, dp));
        sc.expected.moduli_values[pt] = moduli;
    }
    sc.expected.note =
        "composite of a seeded two-level tower; expectations from the "
        "threshold oracle on each fiber";
    return sc;
}

std::vector<std::string> canned_names() {
    return {"example2",          "example3",           "example4",
            "example4-punctured", "example5-rational", "example5-irrational"};
}

Scenario canned(const std::string& name) {
    if (name == "example2") return example2({{2, Rat(0)}});
    if (name == "example3") return example3_galois(2, Rat(1, 3), 2);
    if (name == "example4") return example4(false);
    if (name == "example4-punctured") return example4(true);
    if (name == "example5" || name == "example5-rational")
        return example5(ExtReal(Rat(3, 4)), ExtReal(Rat(1, 2)));
    if (name == "example5-irrational") {
        ContextPtr ctx = GeneratorContext::create();
        ctx->declare_sqrt("sqrt2_half", Rat(1, 2));
        ctx->declare_sqrt("sqrt3_third", Rat(1, 3));
        Scenario sc = example5(ExtReal::generator(ctx, "sqrt2_half"),
                               ExtReal::generator(ctx, "sqrt3_third"));
        sc.generators = {{"sqrt2_half", Rat(1, 2)},
                         {"sqrt3_third", Rat(1, 3)}};
        return sc;
    }
    std::string known;
    for (const auto& n : canned_names()) known += " " + n;
    throw InputError("unknown scenario \"" + name + "\"; canned names:" +
                     known);
}

}  // namespace adjlab
