#pragma once

#include <string>

#include "adjlab/cover.hpp"

namespace adjlab {

// Graphviz view of the state's blowup history plus a `depth`-round probe
// of every live crossing.  Divisors of the state are boxes labeled with
// their divisorial multiplicity; probe exceptionals are ellipses labeled
// with their value, the codiscrepancy predicted from the state's trace,
// and ok/violated.  Edges join each exceptional to the divisors through
// its center.
std::string to_dot(const CoverState& st, int depth);

}  // namespace adjlab
