#include "adjlab/dot_export.hpp"

#include <sstream>

namespace adjlab {

namespace {

// Escapes quotes only: the label strings below carry deliberate \n escapes
// for graphviz line breaks.
std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string to_dot(const CoverState& st, int depth) {
    BDivExpansion probe = ddiv_bdiv(st, depth);
    BDivExpansion predicted =
        codiscrepancy_bdiv(st.base, ddiv_trace(st), depth);
    // Both expansions extend st.base by the same deterministic blowups, so
    // divisor ids line up.
    DivId first_probe = static_cast<DivId>(st.base.divisors.size());
    std::ostringstream os;
    os << "digraph blowups {\n  rankdir=TB;\n  node [fontname=\"monospace\"];\n";
    for (const auto& dv : probe.model.divisors) {
        const ExtReal& v = probe.trace.mult.at(dv.id);
        os << "  " << quote(dv.name) << " [";
        if (dv.id < first_probe) {
            os << "shape=box";
            if (dv.origin_node >= 0) os << ", style=rounded";
            os << ", label=" << quote(dv.name + "\\n" + v.str());
        } else {
            const ExtReal& p = predicted.trace.mult.at(dv.id);
            bool ok = v == p;
            os << "shape=ellipse";
            if (!ok) os << ", color=red";
            os << ", label="
               << quote(dv.name + "\\nvalue " + v.str() + "\\npredicted " +
                        p.str() + (ok ? "\\nok" : "\\nviolated"));
        }
        os << "];\n";
    }
    for (const auto& node : probe.model.tree) {
        const std::string& child = probe.model.divisors[node.exceptional].name;
        for (DivId w : node.through)
            os << "  " << quote(probe.model.divisors[w].name) << " -> "
               << quote(child) << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace adjlab
