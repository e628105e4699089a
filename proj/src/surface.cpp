#include "adjlab/surface.hpp"

#include <algorithm>
#include <cctype>

#include "adjlab/errors.hpp"

namespace adjlab {

namespace {

bool reserved_name(const std::string& name) {
    if (name.size() < 2 || name[0] != 'E') return false;
    return std::all_of(name.begin() + 1, name.end(), [](unsigned char c) {
        return std::isdigit(c);
    });
}

void check_divisor(const SncModel& model, DivId id) {
    if (id < 0 || static_cast<size_t>(id) >= model.divisors.size())
        throw InputError("divisor id " + std::to_string(id) + " out of range");
}

void insert_point(SncModel& model, PointInfo info) {
    if (info.name.empty()) throw InputError("point needs a name");
    if (model.points.count(info.name))
        throw InputError("point \"" + info.name + "\" already exists");
    int d = 0;
    for (DivId id : info.on) d = std::max(d, model.divisors[id].depth);
    info.depth = d + 1;
    model.points.emplace(info.name, std::move(info));
}

}  // namespace

DivId add_divisor(SncModel& model, const std::string& name) {
    if (name.empty()) throw InputError("divisor needs a name");
    if (reserved_name(name))
        throw InputError("divisor name \"" + name +
                         "\" is reserved for exceptionals");
    for (const auto& dv : model.divisors)
        if (dv.name == name)
            throw InputError("divisor \"" + name + "\" already exists");
    DivId id = static_cast<DivId>(model.divisors.size());
    model.divisors.push_back(PrimeDiv{id, name, -1, 0});
    return id;
}

void add_crossing(SncModel& model, const std::string& point, DivId a,
                  DivId b) {
    check_divisor(model, a);
    check_divisor(model, b);
    if (a == b)
        throw InputError("a crossing needs two distinct divisors: \"" + point +
                         "\"");
    insert_point(model, PointInfo{point, PointKind::Crossing, {a, b}, 1, -1});
}

void declare_free_point(SncModel& model, const std::string& point, DivId on) {
    check_divisor(model, on);
    insert_point(model, PointInfo{point, PointKind::Free, {on}, 1, -1});
}

void declare_off_point(SncModel& model, const std::string& point) {
    insert_point(model, PointInfo{point, PointKind::Off, {}, 1, -1});
}

DivId divisor_by_name(const SncModel& model, const std::string& name) {
    for (const auto& dv : model.divisors)
        if (dv.name == name) return dv.id;
    throw InputError("no divisor named \"" + name + "\"");
}

const PointInfo& point_info(const SncModel& model, const std::string& point) {
    auto it = model.points.find(point);
    if (it == model.points.end())
        throw NoSuchPoint("no live point named \"" + point + "\"");
    return it->second;
}

std::vector<std::string> crossing_points(const SncModel& model, DivId a,
                                         DivId b) {
    std::vector<std::string> out;
    for (const auto& [name, pt] : model.points) {
        if (pt.kind != PointKind::Crossing) continue;
        bool has_a = pt.on[0] == a || pt.on[1] == a;
        bool has_b = pt.on[0] == b || pt.on[1] == b;
        if (has_a && has_b) out.push_back(name);
    }
    return out;
}

std::pair<SncModel, DivId> blow_up(const SncModel& model,
                                   const std::string& point) {
    auto it = model.points.find(point);
    if (it == model.points.end())
        throw NoSuchPoint("no live point named \"" + point + "\"");
    SncModel next = model;
    PointInfo consumed = it->second;
    next.points.erase(point);

    DivId eid = static_cast<DivId>(next.divisors.size());
    int node_idx = static_cast<int>(next.tree.size());
    std::string ename = "E" + std::to_string(node_idx + 1);
    next.divisors.push_back(PrimeDiv{eid, ename, node_idx, consumed.depth});

    TreeNode node;
    node.point = point;
    node.through = consumed.on;
    node.exceptional = eid;
    node.parent = consumed.creator;
    node.depth = consumed.depth;
    for (DivId a : consumed.on) {
        std::string fresh = point + "/" + next.divisors[a].name;
        PointInfo pi{fresh, PointKind::Crossing, {eid, a}, 1, node_idx};
        insert_point(next, std::move(pi));
        node.created_points.push_back(fresh);
    }
    next.tree.push_back(std::move(node));
    return {std::move(next), eid};
}

BDivTrace trace_of(const SncModel& model,
                   const std::map<std::string, Rat>& by_name) {
    BDivTrace t;
    for (const auto& [name, q] : by_name)
        t.mult[divisor_by_name(model, name)] = ExtReal(q);
    if (t.mult.size() != model.divisors.size())
        throw InputError("trace must assign every divisor a multiplicity");
    return t;
}

ExtReal codiscrepancy_step(const SncModel& model, const BDivTrace& trace,
                           const std::string& point) {
    const PointInfo& pt = point_info(model, point);
    ExtReal sum(0);
    for (DivId id : pt.on) {
        auto it = trace.mult.find(id);
        if (it == trace.mult.end())
            throw InputError("trace missing divisor \"" +
                             model.divisors[id].name + "\"");
        sum += it->second;
    }
    return sum - ExtReal(1);
}

SncModel expand_crossings(
    SncModel model, int rounds,
    const std::function<void(const SncModel&, int)>& visit) {
    for (int r = 0; r < rounds; ++r) {
        std::vector<std::string> targets;
        for (const auto& [name, pt] : model.points)
            if (pt.kind == PointKind::Crossing) targets.push_back(name);
        for (const std::string& name : targets) {
            auto [next, eid] = blow_up(model, name);
            model = std::move(next);
            if (visit) visit(model, static_cast<int>(model.tree.size()) - 1);
        }
    }
    return model;
}

namespace {

BDivExpansion expand_with_rule(
    const SncModel& model, const BDivTrace& trace, int depth,
    bool codiscrepancy) {
    std::map<DivId, ExtReal> b = trace.mult;
    for (const auto& dv : model.divisors)
        if (!b.count(dv.id))
            throw InputError("trace missing divisor \"" + dv.name + "\"");
    if (b.size() != model.divisors.size())
        throw InputError("trace mentions divisors outside the model");

    // Second route for the codiscrepancy: total transform t of the divisor
    // and relative canonical coefficients a accumulate independently;
    // the codiscrepancy must equal t - a at every node.
    std::map<DivId, ExtReal> t = b;
    std::map<DivId, ExtReal> a;
    for (const auto& dv : model.divisors) a[dv.id] = ExtReal(0);

    BDivExpansion out;
    out.model = expand_crossings(
        model, depth, [&](const SncModel& m, int node_idx) {
            const TreeNode& node = m.tree[node_idx];
            DivId e = node.exceptional;
            ExtReal bs(0);
            for (DivId w : node.through) bs += b.at(w);
            if (codiscrepancy) {
                ExtReal ts(0), as(0);
                for (DivId w : node.through) {
                    ts += t.at(w);
                    as += a.at(w);
                }
                b[e] = bs - ExtReal(1);
                t[e] = ts;
                a[e] = as + ExtReal(1);
                if (b[e] != t[e] - a[e])
                    throw Error("codiscrepancy routes disagree at " +
                                m.divisors[e].name);
            } else {
                b[e] = bs;  // total-transform closure
            }
        });
    out.trace.mult = std::move(b);
    out.trace.depth = depth;
    return out;
}

}  // namespace

BDivExpansion codiscrepancy_bdiv(const SncModel& model, const BDivTrace& trace,
                                 int depth) {
    return expand_with_rule(model, trace, depth, true);
}

BDivExpansion pullback_closure(const SncModel& model, const BDivTrace& trace,
                               int depth) {
    return expand_with_rule(model, trace, depth, false);
}

BDivCompare bdiv_equal(const BDivExpansion& a, const BDivExpansion& b,
                       int max_depth) {
    const SncModel& ma = a.model;
    const SncModel& mb = b.model;
    if (ma.divisors.size() != mb.divisors.size() ||
        ma.tree.size() != mb.tree.size())
        throw TreeMismatch("expansions have different shapes");
    for (size_t i = 0; i < ma.divisors.size(); ++i)
        if (ma.divisors[i].name != mb.divisors[i].name)
            throw TreeMismatch("divisor #" + std::to_string(i) +
                               " differs: " + ma.divisors[i].name + " vs " +
                               mb.divisors[i].name);
    for (size_t i = 0; i < ma.tree.size(); ++i) {
        const TreeNode& na = ma.tree[i];
        const TreeNode& nb = mb.tree[i];
        if (na.point != nb.point || na.through != nb.through ||
            na.exceptional != nb.exceptional)
            throw TreeMismatch("blowup #" + std::to_string(i) +
                               " differs: " + na.point + " vs " + nb.point);
    }
    // Divisors are stored in creation order, so the first hit is the
    // shallowest divergence.
    for (const auto& dv : ma.divisors) {
        if (dv.depth > max_depth) continue;
        const ExtReal& va = a.trace.mult.at(dv.id);
        const ExtReal& vb = b.trace.mult.at(dv.id);
        if (va != vb)
            return BDivCompare{false, dv.name + " (depth " +
                                          std::to_string(dv.depth) +
                                          "): " + va.str() + " vs " +
                                          vb.str()};
    }
    return BDivCompare{};
}

BDivTrace pushforward_trace(const SncModel& model, const BDivTrace& trace) {
    BDivTrace out;
    for (const auto& dv : model.divisors) {
        if (dv.origin_node != -1) continue;
        auto it = trace.mult.find(dv.id);
        if (it == trace.mult.end())
            throw InputError("trace missing divisor \"" + dv.name + "\"");
        out.mult[dv.id] = it->second;
    }
    out.depth = 0;
    return out;
}

}  // namespace adjlab
