#pragma once

#include <stdexcept>
#include <string>

namespace adjlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Arithmetic on values tied to different generator contexts.
struct ContextMismatch : Error {
    using Error::Error;
};

// Interval refinement hit its budget before the comparison resolved.
struct PrecisionExhausted : Error {
    using Error::Error;
};

// Rational-only query on an irrational value.
struct NotRational : Error {
    using Error::Error;
};

// A boundary multiplicity exceeds 1.
struct NotGLC : Error {
    using Error::Error;
};

// Tower composition with inconsistent incidence data.
struct TowerMismatch : Error {
    using Error::Error;
};

struct NoSuchPoint : Error {
    using Error::Error;
};

// Comparing b-divisor truncations over different blowup trees.
struct TreeMismatch : Error {
    using Error::Error;
};

// Every preimage of the queried point is punctured.
struct EmptyFiber : Error {
    using Error::Error;
};

// Saturation requested where its precondition fails.
struct SaturationIllegal : Error {
    using Error::Error;
};

// Malformed or out-of-schema input.
struct InputError : Error {
    using Error::Error;
};

}  // namespace adjlab
