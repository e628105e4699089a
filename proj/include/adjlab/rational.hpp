#pragma once

#include <gmpxx.h>

#include <string>

namespace adjlab {

using Rat = mpq_class;

// Parses "p", "-p" or "p/q" (base 10) into canonical form.
Rat parse_rational(const std::string& text);

std::string to_string(const Rat& q);

}  // namespace adjlab
