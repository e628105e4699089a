#include "adjlab/cover.hpp"

#include <algorithm>

#include "adjlab/errors.hpp"

namespace adjlab {

namespace {

const std::set<int> kNoDead;

const std::set<int>& dead_at(const CoverState& st, const std::string& point) {
    auto it = st.dead.find(point);
    return it == st.dead.end() ? kNoDead : it->second;
}

bool sheet_dead(const CoverState& st, const std::string& point, int sheet) {
    return dead_at(st, point).count(sheet) != 0;
}

const std::vector<SheetCopy>& copies_of(const CoverState& st, DivId div) {
    auto it = st.up.find(div);
    if (it == st.up.end())
        throw InputError("no multiplicity data for divisor id " +
                         std::to_string(div));
    if ((int)it->second.size() != st.sheets)
        throw InputError("sheet copy vector has the wrong size for divisor " +
                         std::to_string(div));
    return it->second;
}

std::string div_name(const CoverState& st, DivId div) {
    for (const auto& dv : st.base.divisors)
        if (dv.id == div) return dv.name;
    throw InputError("unknown divisor id " + std::to_string(div));
}

bool images_meet(const CoverState& st, DivId a, DivId b) {
    return a == b || !crossing_points(st.base, a, b).empty();
}

// Sheets are disjoint copies, so same sheet plus a surviving common
// crossing is the only way two upstairs divisors meet.
bool meet_upstairs(const CoverState& st, DivId a, int sa, DivId b, int sb) {
    if (sa != sb) return false;
    if (a == b) return true;
    for (const std::string& p : crossing_points(st.base, a, b))
        if (!sheet_dead(st, p, sa)) return true;
    return false;
}

}  // namespace

CoverState make_cover(SncModel base, int sheets, std::set<DivId> boundary,
                      const std::map<DivId, std::vector<ExtReal>>& mults) {
    CoverState st;
    st.base = std::move(base);
    st.sheets = sheets;
    st.boundary = std::move(boundary);
    for (const auto& dv : st.base.divisors) {
        std::vector<SheetCopy> copies((size_t)std::max(sheets, 0));
        if (auto it = mults.find(dv.id); it != mults.end()) {
            if ((int)it->second.size() != sheets)
                throw InputError("multiplicity list for " + dv.name +
                                 " needs one entry per sheet");
            for (int s = 0; s < sheets; ++s) copies[s].mult = it->second[s];
        }
        st.up.emplace(dv.id, std::move(copies));
    }
    for (const auto& [id, list] : mults)
        if (!st.up.count(id))
            throw InputError("multiplicities given for an unknown divisor id " +
                             std::to_string(id));
    validate_cover(st);
    return st;
}

void puncture(CoverState& st, int sheet, const std::string& point) {
    point_info(st.base, point);
    if (sheet < 0 || sheet >= st.sheets)
        throw InputError("puncture sheet index out of range");
    st.dead[point].insert(sheet);
}

void validate_cover(const CoverState& st) {
    if (st.sheets < 1) throw InputError("a cover needs at least one sheet");
    ExtReal one(1);
    ExtReal zero(0);
    for (const auto& dv : st.base.divisors) {
        const auto& copies = copies_of(st, dv.id);
        bool in_boundary = st.boundary.count(dv.id) != 0;
        for (int s = 0; s < st.sheets; ++s) {
            const SheetCopy& c = copies[s];
            if (!c.present) {
                if (dv.origin_node < 0)
                    throw InputError("original divisor " + dv.name +
                                     " is missing its copy on sheet " +
                                     std::to_string(s));
                continue;
            }
            if (c.mult > one)
                throw NotGLC("multiplicity above 1 on " + dv.name +
                             ", sheet " + std::to_string(s));
            if (!in_boundary && dv.origin_node < 0 && !(c.mult == zero))
                throw InputError("divisor " + dv.name +
                                 " outside the boundary carries a nonzero "
                                 "multiplicity");
        }
    }
    for (DivId d : st.boundary) div_name(st, d);
    for (const auto& [pt, sheets] : st.dead) {
        point_info(st.base, pt);
        for (int s : sheets)
            if (s < 0 || s >= st.sheets)
                throw InputError("puncture sheet out of range at \"" + pt +
                                 "\"");
    }
}

bool is_normalized(const CoverState& st) {
    ExtReal one(1);
    for (DivId d : st.boundary)
        if (!(ddiv_mult_at(st, d) == one)) return false;
    return true;
}

ExtReal ddiv_mult_at(const CoverState& st, DivId divisor) {
    const auto& copies = copies_of(st, divisor);
    bool any = false;
    ExtReal best;
    for (const auto& c : copies) {
        if (!c.present) continue;
        if (!any || c.mult > best) best = c.mult;
        any = true;
    }
    if (!any)
        throw EmptyFiber("divisor " + div_name(st, divisor) +
                         " has no surviving copy");
    return best;
}

ExtReal ddiv_mult_at(const CoverState& st, const std::string& point) {
    const PointInfo& pt = point_info(st.base, point);
    const std::set<int>& dp = dead_at(st, point);
    bool any = false;
    ExtReal best;
    for (int s = 0; s < st.sheets; ++s) {
        if (dp.count(s)) continue;
        ExtReal sum(0);
        bool alive = true;
        for (DivId w : pt.on) {
            const SheetCopy& c = copies_of(st, w)[s];
            if (!c.present) {
                alive = false;
                break;
            }
            sum += c.mult;
        }
        if (!alive) continue;
        ExtReal b = sum - ExtReal(1);
        if (!any || b > best) best = b;
        any = true;
    }
    if (!any)
        throw EmptyFiber("every sheet is punctured over \"" + point + "\"");
    return best;
}

BDivTrace ddiv_trace(const CoverState& st) {
    BDivTrace tr;
    for (const auto& dv : st.base.divisors)
        tr.mult.emplace(dv.id, ddiv_mult_at(st, dv.id));
    return tr;
}

BDivExpansion ddiv_bdiv(const CoverState& st, int depth) {
    // Per-sheet crepant layer: only surviving copies get entries, so a
    // sheet lost at some center stays silent further down automatically.
    std::vector<std::map<DivId, ExtReal>> layer((size_t)st.sheets);
    for (const auto& [id, copies] : st.up)
        for (int s = 0; s < st.sheets; ++s)
            if (copies[s].present) layer[s].emplace(id, copies[s].mult);
    std::map<std::string, std::set<int>> dead = st.dead;

    BDivExpansion out;
    out.trace.depth = depth;
    for (const auto& dv : st.base.divisors)
        out.trace.mult.emplace(dv.id, ddiv_mult_at(st, dv.id));

    out.model = expand_crossings(
        st.base, depth, [&](const SncModel& m, int ni) {
            const TreeNode& node = m.tree[(size_t)ni];
            std::set<int> dp;
            if (auto it = dead.find(node.point); it != dead.end())
                dp = it->second;
            bool any = false;
            ExtReal best;
            for (int s = 0; s < st.sheets; ++s) {
                if (dp.count(s)) continue;
                ExtReal sum(0);
                bool alive = true;
                for (DivId w : node.through) {
                    auto it = layer[s].find(w);
                    if (it == layer[s].end()) {
                        alive = false;
                        break;
                    }
                    sum += it->second;
                }
                if (!alive) continue;
                ExtReal bs = sum - ExtReal(1);
                layer[s].emplace(node.exceptional, bs);
                if (!any || bs > best) best = bs;
                any = true;
            }
            if (!any)
                throw EmptyFiber("every sheet is punctured over \"" +
                                 node.point + "\"");
            out.trace.mult.emplace(node.exceptional, best);
            if (!dp.empty())
                for (const std::string& fresh : node.created_points)
                    dead.emplace(fresh, dp);
        });
    return out;
}

bool bp_local_ok(const CoverState& st, const std::string& crossing) {
    const PointInfo& pt = point_info(st.base, crossing);
    if (pt.kind != PointKind::Crossing)
        throw InputError("\"" + crossing + "\" is not a crossing point");
    ExtReal actual = ddiv_mult_at(st, crossing);
    ExtReal predicted = codiscrepancy_step(st.base, ddiv_trace(st), crossing);
    return actual == predicted;
}

std::pair<CoverState, DivId> cover_blow_up(const CoverState& st,
                                           const std::string& point) {
    const PointInfo& pt = point_info(st.base, point);
    const std::vector<DivId> through = pt.on;
    const std::set<int> dp = dead_at(st, point);

    CoverState out = st;
    auto blown = blow_up(st.base, point);
    out.base = std::move(blown.first);
    DivId eid = blown.second;
    const TreeNode& node = out.base.tree.back();

    std::vector<SheetCopy> copies((size_t)st.sheets);
    bool any = false;
    for (int s = 0; s < st.sheets; ++s) {
        if (dp.count(s)) {
            copies[s].present = false;
            continue;
        }
        ExtReal sum(0);
        bool alive = true;
        for (DivId w : through) {
            const SheetCopy& c = copies_of(st, w)[s];
            if (!c.present) {
                alive = false;
                break;
            }
            sum += c.mult;
        }
        if (!alive) {
            copies[s].present = false;
            continue;
        }
        copies[s].mult = sum - ExtReal(1);
        any = true;
    }
    if (!any)
        throw EmptyFiber("every sheet is punctured over \"" + point + "\"");
    out.up.emplace(eid, std::move(copies));
    out.dead.erase(point);
    if (!dp.empty())
        for (const std::string& fresh : node.created_points)
            out.dead.emplace(fresh, dp);
    return {std::move(out), eid};
}

std::pair<CoverState, std::vector<StepRecord>> normalize(const CoverState& st) {
    validate_cover(st);
    CoverState out = st;
    std::vector<StepRecord> recs;
    ExtReal one(1);
    for (DivId d : out.boundary) {
        ExtReal mu = ddiv_mult_at(out, d);
        if (mu == one) continue;
        ExtReal shift = one - mu;
        auto& copies = out.up.at(d);
        for (auto& c : copies)
            if (c.present) c.mult += shift;
        StepRecord rec;
        rec.kind = StepKind::Normalization;
        rec.location = div_name(out, d);
        rec.crepant.resize((size_t)out.sheets);
        for (int s = 0; s < out.sheets; ++s)
            if (copies[s].present) rec.crepant[s] = copies[s].mult;
        rec.ddiv = one;
        rec.shift = shift;
        rec.sub1_after = sub1_divisors(out);
        recs.push_back(std::move(rec));
    }
    return {std::move(out), std::move(recs)};
}

std::vector<Sub1Entry> sub1_divisors(const CoverState& st) {
    std::vector<Sub1Entry> out;
    ExtReal one(1);
    for (DivId d : st.boundary) {
        const auto& copies = copies_of(st, d);
        for (int s = 0; s < st.sheets; ++s) {
            if (!copies[s].present) continue;
            if (copies[s].mult < one) {
                Sub1Entry e;
                e.div = d;
                e.sheet = s;
                e.mult = copies[s].mult;
                e.divisor_name = div_name(st, d);
                out.push_back(std::move(e));
            }
        }
    }
    return out;
}

std::vector<Sub1Entry> obstructors_of(const CoverState& st, DivId div,
                                      int sheet) {
    std::vector<Sub1Entry> out;
    for (Sub1Entry& e : sub1_divisors(st)) {
        if (e.div == div && e.sheet == sheet) continue;
        if (!images_meet(st, div, e.div)) continue;
        if (meet_upstairs(st, div, sheet, e.div, e.sheet)) continue;
        out.push_back(std::move(e));
    }
    return out;
}

std::pair<CoverState, StepRecord> saturate(const CoverState& st, DivId div,
                                           int sheet, int check_depth) {
    if (!is_normalized(st))
        throw InputError("saturation requires a normalized state");
    if (!st.boundary.count(div))
        throw InputError("saturation target must be a boundary divisor");
    const auto& copies = copies_of(st, div);
    if (sheet < 0 || sheet >= st.sheets || !copies[(size_t)sheet].present)
        throw InputError("no surviving copy to saturate");
    ExtReal one(1);
    ExtReal old = copies[(size_t)sheet].mult;
    if (!(old < one))
        throw SaturationIllegal("the copy of " + div_name(st, div) +
                                " on sheet " + std::to_string(sheet) +
                                " is already reduced");
    auto obs = obstructors_of(st, div, sheet);
    if (!obs.empty())
        throw SaturationIllegal(
            "the copy of " + div_name(st, div) + " on sheet " +
            std::to_string(sheet) + " is blocked by a disjoint sub-1 copy of " +
            obs.front().divisor_name);

    CoverState out = st;
    out.up.at(div)[(size_t)sheet].mult = one;
    if (check_depth > 0) {
        BDivCompare cmp =
            bdiv_equal(ddiv_bdiv(st, check_depth), ddiv_bdiv(out, check_depth));
        if (!cmp.equal)
            throw SaturationIllegal(
                "saturation changes the divisorial b-divisor: " +
                cmp.divergence);
    }

    StepRecord rec;
    rec.kind = StepKind::Saturation;
    rec.location = div_name(st, div);
    rec.sheet = sheet;
    rec.crepant.resize((size_t)out.sheets);
    const auto& after = out.up.at(div);
    for (int s = 0; s < out.sheets; ++s)
        if (after[(size_t)s].present) rec.crepant[(size_t)s] = after[(size_t)s].mult;
    rec.ddiv = one;
    rec.shift = one - old;
    rec.sub1_after = sub1_divisors(out);
    return {std::move(out), std::move(rec)};
}

std::pair<CoverState, StepRecord> blowup_step(const CoverState& st,
                                              const std::string& crossing) {
    if (!is_normalized(st))
        throw InputError("a blowup step requires a normalized state");
    const PointInfo& pt = point_info(st.base, crossing);
    if (pt.kind != PointKind::Crossing)
        throw InputError("\"" + crossing + "\" is not a crossing point");
    std::vector<DivId> through = pt.on;

    auto blown = cover_blow_up(st, crossing);
    CoverState out = std::move(blown.first);
    DivId eid = blown.second;
    auto& copies = out.up.at(eid);

    StepRecord rec;
    rec.kind = StepKind::Blowup;
    rec.location = crossing;
    rec.crepant.resize((size_t)out.sheets);
    bool any = false;
    ExtReal best;
    for (int s = 0; s < out.sheets; ++s) {
        if (!copies[(size_t)s].present) continue;
        rec.crepant[(size_t)s] = copies[(size_t)s].mult;
        if (!any || copies[(size_t)s].mult > best) best = copies[(size_t)s].mult;
        any = true;
    }
    rec.ddiv = best;
    rec.shift = ExtReal(1) - best;
    for (auto& c : copies)
        if (c.present) c.mult += rec.shift;
    out.boundary.insert(eid);

    // Co-multiplicities (1 - min sheet mult) of the two crossing divisors,
    // ordered by divisor id: the pair a subtractive-Euclid run would hold.
    std::sort(through.begin(), through.end());
    std::vector<ExtReal> comult;
    for (DivId w : through) {
        const auto& wc = copies_of(st, w);
        bool seen = false;
        ExtReal mn;
        for (int s = 0; s < st.sheets; ++s) {
            if (!wc[(size_t)s].present) continue;
            if (!seen || wc[(size_t)s].mult < mn) mn = wc[(size_t)s].mult;
            seen = true;
        }
        if (seen) comult.push_back(ExtReal(1) - mn);
    }
    if (comult.size() == 2) rec.comult_pair = {comult[0], comult[1]};
    rec.sub1_after = sub1_divisors(out);
    return {std::move(out), std::move(rec)};
}

StabilizeResult stabilize(const CoverState& input, int cap, int check_depth) {
    if (input.sheets != 2)
        throw InputError("stabilization is implemented for two-sheet covers");
    validate_cover(input);

    StabilizeResult res;
    auto normalized = normalize(input);
    CoverState st = std::move(normalized.first);
    res.trace = std::move(normalized.second);

    // Denominator scale for the termination measure; only meaningful (and
    // only recorded) when every multiplicity is rational.
    bool rational = true;
    mpz_class scale(1);
    for (const auto& [id, copies] : st.up) {
        (void)id;
        for (const auto& c : copies) {
            if (!c.present) continue;
            if (!c.mult.is_rational()) {
                rational = false;
                break;
            }
            mpz_class den = c.mult.as_rational().get_den();
            mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), den.get_mpz_t());
        }
        if (!rational) break;
    }

    int steps = 0;
    while (true) {
        std::vector<Sub1Entry> sub1 = sub1_divisors(st);
        if (sub1.empty()) break;
        if (steps >= cap) {
            res.state = std::move(st);
            return res;
        }

        ExtReal dmin = sub1.front().mult;
        for (const auto& e : sub1)
            if (e.mult < dmin) dmin = e.mult;
        const Sub1Entry* pick = nullptr;
        for (const auto& e : sub1)
            if (e.mult == dmin) {
                pick = &e;
                break;
            }
        auto obs = obstructors_of(st, pick->div, pick->sheet);

        std::optional<Measure> measure;
        if (rational) {
            Measure ms;
            Rat co = Rat(1) - dmin.as_rational();
            ms.scaled_comult = Rat(scale) * co;
            ms.scaled_comult.canonicalize();
            for (const auto& e : sub1)
                if (e.mult == dmin) ms.count_at_min++;
            for (const auto& o : obs)
                ms.bad_pairs +=
                    (long)crossing_points(st.base, pick->div, o.div).size();
            measure = ms;
        }

        if (obs.empty()) {
            auto stepped = saturate(st, pick->div, pick->sheet, check_depth);
            stepped.second.measure = measure;
            st = std::move(stepped.first);
            res.trace.push_back(std::move(stepped.second));
            res.saturations++;
        } else {
            const Sub1Entry& bad = obs.front();
            std::vector<std::string> pts =
                crossing_points(st.base, pick->div, bad.div);
            if (pts.empty())
                throw Error("obstructor without a base crossing");
            std::sort(pts.begin(), pts.end());
            auto stepped = blowup_step(st, pts.front());
            stepped.second.measure = measure;
            st = std::move(stepped.first);
            res.trace.push_back(std::move(stepped.second));
            res.blowups++;
        }
        steps++;
    }

    // A clean exit must actually be stable: the local max test holds at
    // every crossing and the divisorial b-divisor is the codiscrepancy
    // b-divisor of its own trace.
    for (const auto& [name, pt] : st.base.points)
        if (pt.kind == PointKind::Crossing && !bp_local_ok(st, name))
            throw Error("stabilized state fails the local max test at \"" +
                        name + "\"");
    if (check_depth > 0) {
        BDivCompare cmp =
            bdiv_equal(ddiv_bdiv(st, check_depth),
                       codiscrepancy_bdiv(st.base, ddiv_trace(st), check_depth));
        if (!cmp.equal)
            throw Error(
                "stabilized state disagrees with the codiscrepancy "
                "b-divisor: " +
                cmp.divergence);
    }
    res.stabilized = true;
    res.state = std::move(st);
    return res;
}

EuclidResult euclid_oracle(const ExtReal& alpha, const ExtReal& beta, int cap) {
    ExtReal zero(0);
    if (!(alpha > zero) || !(beta > zero))
        throw InputError("the subtractive oracle needs positive inputs");
    ExtReal a = alpha;
    ExtReal b = beta;
    EuclidResult res;
    while (true) {
        int c = a.compare(b);
        if (c == 0) {
            res.terminated = true;
            return res;
        }
        if (res.steps >= cap) return res;
        if (c > 0)
            a = a - b;
        else
            b = b - a;
        res.steps++;
    }
}

}  // namespace adjlab
