#pragma once

#include <string>

#include "adjlab/cover.hpp"
#include "adjlab/scenarios.hpp"
#include "json.hpp"

namespace adjlab {

using Json = nlohmann::ordered_json;

// Values serialize as {"q": "3/4"} plus, when generator coefficients are
// present, {"gens": {"sqrt2_half": "1"}}.  Reading a value with generators
// requires a context that already declares them.
Json ext_to_json(const ExtReal& x);
ExtReal ext_from_json(const Json& j, const ContextPtr& ctx);

// Covers serialize as an original model only (divisors, crossings, marked
// points, boundary, sheet table, punctures); states with blowup history
// are rejected.
Json cover_to_json(const CoverState& st);
CoverState cover_from_json(const Json& j, const ContextPtr& ctx);

Json curve_to_json(const CurveCover& c);
CurveCover curve_from_json(const Json& j, const ContextPtr& ctx);

Json scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const Json& j);

// Reads and parses a scenario file.  Missing files and malformed JSON
// become InputError; parse errors keep the parser's byte position.
Scenario load_scenario(const std::string& path);

// Step-by-step stabilization record plus the verdict.
Json trace_to_json(const StabilizeResult& res);

void save_text(const std::string& path, const std::string& text);

}  // namespace adjlab
