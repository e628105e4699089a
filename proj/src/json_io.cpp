#include "adjlab/json_io.hpp"

#include <fstream>
#include <sstream>

#include "adjlab/errors.hpp"

namespace adjlab {

namespace {

const Json& field(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw InputError(std::string("missing field \"") + key + "\"");
    return *it;
}

std::string str_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_string())
        throw InputError(std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
}

long int_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number_integer())
        throw InputError(std::string("field \"") + key +
                         "\" must be an integer");
    return v.get<long>();
}

std::string kind_name(StepKind k) {
    switch (k) {
        case StepKind::Normalization: return "normalization";
        case StepKind::Saturation: return "saturation";
        case StepKind::Blowup: return "blowup";
    }
    return "?";
}

}  // namespace

Json ext_to_json(const ExtReal& x) {
    Json j;
    j["q"] = to_string(x.rational_part());
    if (!x.coeffs().empty()) {
        Json gens = Json::object();
        for (const auto& [name, c] : x.coeffs()) gens[name] = to_string(c);
        j["gens"] = gens;
    }
    return j;
}

ExtReal ext_from_json(const Json& j, const ContextPtr& ctx) {
    if (!j.is_object()) throw InputError("value must be an object");
    Rat q0 = parse_rational(str_field(j, "q"));
    auto it = j.find("gens");
    if (it == j.end()) return ExtReal(q0);
    if (!it->is_object()) throw InputError("\"gens\" must be an object");
    std::map<std::string, Rat> coeffs;
    for (const auto& [name, c] : it->items()) {
        if (!c.is_string())
            throw InputError("generator coefficient must be a string");
        coeffs[name] = parse_rational(c.get<std::string>());
    }
    if (coeffs.empty()) return ExtReal(q0);
    if (!ctx)
        throw InputError(
            "value uses generators but no generators are declared");
    return ExtReal::make(q0, std::move(coeffs), ctx);
}

Json cover_to_json(const CoverState& st) {
    if (!st.base.tree.empty())
        throw InputError("only original models serialize to JSON");
    Json j;
    j["sheets"] = st.sheets;
    Json divisors = Json::array();
    for (const auto& d : st.base.divisors) divisors.push_back(d.name);
    j["divisors"] = divisors;
    Json crossings = Json::array();
    Json free_points = Json::array();
    Json off_points = Json::array();
    for (const auto& [name, info] : st.base.points) {
        switch (info.kind) {
            case PointKind::Crossing:
                crossings.push_back(
                    {{"point", name},
                     {"a", st.base.divisors[info.on[0]].name},
                     {"b", st.base.divisors[info.on[1]].name}});
                break;
            case PointKind::Free:
                free_points.push_back(
                    {{"point", name},
                     {"on", st.base.divisors[info.on[0]].name}});
                break;
            case PointKind::Off:
                off_points.push_back(name);
                break;
        }
    }
    j["crossings"] = crossings;
    if (!free_points.empty()) j["free_points"] = free_points;
    if (!off_points.empty()) j["off_points"] = off_points;
    Json boundary = Json::array();
    for (DivId id : st.boundary) boundary.push_back(st.base.divisors[id].name);
    j["boundary"] = boundary;
    Json mults = Json::object();
    for (const auto& d : st.base.divisors) {
        Json row = Json::array();
        for (const auto& copy : st.up.at(d.id)) row.push_back(
            ext_to_json(copy.mult));
        mults[d.name] = row;
    }
    j["mults"] = mults;
    if (!st.dead.empty()) {
        Json punctures = Json::array();
        for (const auto& [point, sheets] : st.dead)
            for (int s : sheets)
                punctures.push_back({{"point", point}, {"sheet", s}});
        j["punctures"] = punctures;
    }
    return j;
}

CoverState cover_from_json(const Json& j, const ContextPtr& ctx) {
    if (!j.is_object()) throw InputError("cover must be an object");
    SncModel base;
    const Json& divisors = field(j, "divisors");
    if (!divisors.is_array()) throw InputError("\"divisors\" must be a list");
    for (const auto& d : divisors) {
        if (!d.is_string()) throw InputError("divisor names must be strings");
        add_divisor(base, d.get<std::string>());
    }
    const Json& crossings = field(j, "crossings");
    if (!crossings.is_array()) throw InputError("\"crossings\" must be a list");
    for (const auto& c : crossings)
        add_crossing(base, str_field(c, "point"),
                     divisor_by_name(base, str_field(c, "a")),
                     divisor_by_name(base, str_field(c, "b")));
    if (auto it = j.find("free_points"); it != j.end())
        for (const auto& f : *it)
            declare_free_point(base, str_field(f, "point"),
                               divisor_by_name(base, str_field(f, "on")));
    if (auto it = j.find("off_points"); it != j.end())
        for (const auto& o : *it) {
            if (!o.is_string())
                throw InputError("off-point names must be strings");
            declare_off_point(base, o.get<std::string>());
        }
    int sheets = static_cast<int>(int_field(j, "sheets"));
    std::set<DivId> boundary;
    const Json& bd = field(j, "boundary");
    if (!bd.is_array()) throw InputError("\"boundary\" must be a list");
    for (const auto& b : bd) {
        if (!b.is_string()) throw InputError("boundary names must be strings");
        boundary.insert(divisor_by_name(base, b.get<std::string>()));
    }
    const Json& mults = field(j, "mults");
    if (!mults.is_object()) throw InputError("\"mults\" must be an object");
    std::map<DivId, std::vector<ExtReal>> table;
    for (const auto& [name, row] : mults.items()) {
        if (!row.is_array())
            throw InputError("sheet multiplicities must be a list");
        std::vector<ExtReal> vals;
        for (const auto& v : row) vals.push_back(ext_from_json(v, ctx));
        table[divisor_by_name(base, name)] = std::move(vals);
    }
    CoverState st = make_cover(std::move(base), sheets, std::move(boundary),
                               table);
    if (auto it = j.find("punctures"); it != j.end())
        for (const auto& p : *it)
            puncture(st, static_cast<int>(int_field(p, "sheet")),
                     str_field(p, "point"));
    return st;
}

Json curve_to_json(const CurveCover& c) {
    Json j;
    j["degree"] = c.degree;
    Json fibers = Json::object();
    for (const auto& [pt, fib] : c.fibers) {
        Json branches = Json::array();
        for (const auto& b : fib.branches) {
            Json br;
            br["m"] = b.m;
            br["d"] = ext_to_json(b.d);
            if (!b.point.empty()) br["point"] = b.point;
            branches.push_back(br);
        }
        fibers[pt] = branches;
    }
    j["fibers"] = fibers;
    return j;
}

CurveCover curve_from_json(const Json& j, const ContextPtr& ctx) {
    if (!j.is_object()) throw InputError("curve must be an object");
    CurveCover c;
    c.degree = int_field(j, "degree");
    const Json& fibers = field(j, "fibers");
    if (!fibers.is_object()) throw InputError("\"fibers\" must be an object");
    for (const auto& [pt, branches] : fibers.items()) {
        if (!branches.is_array())
            throw InputError("fiber branches must be a list");
        FiberData fib;
        for (const auto& br : branches) {
            BranchData b;
            b.m = int_field(br, "m");
            b.d = ext_from_json(field(br, "d"), ctx);
            if (auto it = br.find("point"); it != br.end())
                b.point = it->get<std::string>();
            fib.branches.push_back(b);
        }
        c.fibers[pt] = fib;
    }
    validate(c);
    return c;
}

Json scenario_to_json(const Scenario& sc) {
    Json j;
    j["name"] = sc.name;
    j["kind"] = sc.kind == ScenarioKind::Curve ? "curve" : "cover";
    if (!sc.generators.empty()) {
        Json gens = Json::array();
        for (const auto& g : sc.generators)
            gens.push_back(
                {{"name", g.name}, {"sqrt_of", to_string(g.sqrt_of)}});
        j["generators"] = gens;
    }
    if (sc.kind == ScenarioKind::Curve)
        j["curve"] = curve_to_json(sc.curve);
    else
        j["cover"] = cover_to_json(sc.cover);
    j["cap"] = sc.cap;
    Json e = Json::object();
    const Expected& x = sc.expected;
    if (x.stabilizes) e["stabilizes"] = *x.stabilizes;
    if (x.blowups) e["blowups"] = *x.blowups;
    if (x.saturations) e["saturations"] = *x.saturations;
    if (!x.point_values.empty()) {
        Json pv = Json::object();
        for (const auto& [pt, v] : x.point_values) pv[pt] = ext_to_json(v);
        e["point_values"] = pv;
    }
    if (!x.disc_values.empty()) {
        Json dv = Json::object();
        for (const auto& [pt, v] : x.disc_values) dv[pt] = ext_to_json(v);
        e["disc_values"] = dv;
    }
    if (!x.moduli_values.empty()) {
        Json mv = Json::object();
        for (const auto& [pt, vs] : x.moduli_values) {
            Json row = Json::array();
            for (const auto& v : vs) row.push_back(ext_to_json(v));
            mv[pt] = row;
        }
        e["moduli_values"] = mv;
    }
    if (!x.note.empty()) e["note"] = x.note;
    if (!e.empty()) j["expected"] = e;
    return j;
}

Scenario scenario_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("scenario must be an object");
    Scenario sc;
    sc.name = str_field(j, "name");
    std::string kind = str_field(j, "kind");
    if (kind == "curve")
        sc.kind = ScenarioKind::Curve;
    else if (kind == "cover")
        sc.kind = ScenarioKind::Cover;
    else
        throw InputError("\"kind\" must be \"curve\" or \"cover\"");
    if (auto it = j.find("generators"); it != j.end()) {
        if (!it->is_array()) throw InputError("\"generators\" must be a list");
        sc.ctx = GeneratorContext::create();
        for (const auto& g : *it) {
            GenDecl decl{str_field(g, "name"),
                         parse_rational(str_field(g, "sqrt_of"))};
            sc.ctx->declare_sqrt(decl.name, decl.sqrt_of);
            sc.generators.push_back(decl);
        }
    }
    if (sc.kind == ScenarioKind::Curve)
        sc.curve = curve_from_json(field(j, "curve"), sc.ctx);
    else
        sc.cover = cover_from_json(field(j, "cover"), sc.ctx);
    if (auto it = j.find("cap"); it != j.end())
        sc.cap = static_cast<int>(int_field(j, "cap"));
    if (auto it = j.find("expected"); it != j.end()) {
        const Json& e = *it;
        Expected& x = sc.expected;
        if (auto f = e.find("stabilizes"); f != e.end())
            x.stabilizes = f->get<bool>();
        if (auto f = e.find("blowups"); f != e.end())
            x.blowups = static_cast<int>(int_field(e, "blowups"));
        if (auto f = e.find("saturations"); f != e.end())
            x.saturations = static_cast<int>(int_field(e, "saturations"));
        if (auto f = e.find("point_values"); f != e.end())
            for (const auto& [pt, v] : f->items())
                x.point_values[pt] = ext_from_json(v, sc.ctx);
        if (auto f = e.find("disc_values"); f != e.end())
            for (const auto& [pt, v] : f->items())
                x.disc_values[pt] = ext_from_json(v, sc.ctx);
        if (auto f = e.find("moduli_values"); f != e.end())
            for (const auto& [pt, row] : f->items()) {
                std::vector<ExtReal> vs;
                for (const auto& v : row) vs.push_back(ext_from_json(v, sc.ctx));
                x.moduli_values[pt] = std::move(vs);
            }
        if (auto f = e.find("note"); f != e.end())
            x.note = f->get<std::string>();
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open \"" + path + "\"");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("parse error in \"") + path + "\": " +
                         e.what());
    }
    try {
        return scenario_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad scenario \"") + path + "\": " +
                         e.what());
    }
}

Json trace_to_json(const StabilizeResult& res) {
    Json j;
    j["stabilized"] = res.stabilized;
    j["blowups"] = res.blowups;
    j["saturations"] = res.saturations;
    Json steps = Json::array();
    for (const StepRecord& r : res.trace) {
        Json s;
        s["kind"] = kind_name(r.kind);
        s["location"] = r.location;
        if (r.sheet >= 0) s["sheet"] = r.sheet;
        if (!r.crepant.empty()) {
            Json cr = Json::array();
            for (const auto& v : r.crepant)
                cr.push_back(v ? ext_to_json(*v) : Json(nullptr));
            s["crepant"] = cr;
        }
        s["value"] = ext_to_json(r.ddiv);
        s["shift"] = ext_to_json(r.shift);
        if (r.comult_pair)
            s["comult_pair"] = Json::array({ext_to_json(r.comult_pair->first),
                                            ext_to_json(r.comult_pair->second)});
        if (r.measure)
            s["measure"] = {{"scaled_comult", to_string(r.measure->scaled_comult)},
                            {"count_at_min", r.measure->count_at_min},
                            {"bad_pairs", r.measure->bad_pairs}};
        Json sub1 = Json::array();
        for (const Sub1Entry& e : r.sub1_after)
            sub1.push_back({{"divisor", e.divisor_name},
                            {"sheet", e.sheet},
                            {"mult", ext_to_json(e.mult)}});
        s["sub1_after"] = sub1;
        steps.push_back(s);
    }
    j["steps"] = steps;
    return j;
}

void save_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write \"" + path + "\"");
    out << text;
    if (!out) throw InputError("write failed for \"" + path + "\"");
}

}  // namespace adjlab
