#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "adjlab/rational.hpp"

namespace adjlab {

struct Enclosure {
    Rat lo, hi;
};

// Maps the current enclosure of a generator to a strictly tighter one
// (width shrinks by at least a factor of 2).
using Refiner = std::function<Enclosure(const Enclosure&)>;

class GeneratorContext;
using ContextPtr = std::shared_ptr<GeneratorContext>;

// Registry of named irrational generators, assumed Q-linearly independent
// together with 1.  Holds the shared enclosure cache; refinement is
// serialized so concurrent comparisons observe monotonically shrinking
// intervals.
class GeneratorContext {
public:
    static ContextPtr create();

    void declare(const std::string& name, Enclosure initial, Refiner refiner);
    // Convenience: g = sqrt(radicand) for a positive non-square rational,
    // refined by bisection.
    void declare_sqrt(const std::string& name, const Rat& radicand);

    bool has(const std::string& name) const;
    Enclosure enclosure(const std::string& name) const;
    void refine(const std::string& name);
    std::vector<std::string> names() const;

    int budget() const;
    void set_budget(int refinements);

private:
    struct Gen {
        Enclosure enc;
        Refiner refine;
    };
    mutable std::mutex mu_;
    std::map<std::string, Gen> gens_;
    int budget_ = 256;
};

// Exact value q0 + sum over k of qk * g_k with rational q0, qk and declared
// generators g_k.  Equality is symbolic (coefficient-wise); strict order is
// decided by refining generator enclosures until 0 is excluded from the
// difference's interval.
class ExtReal {
public:
    ExtReal() : q0_(0) {}
    ExtReal(const Rat& q) : q0_(q) { q0_.canonicalize(); }
    ExtReal(long n) : q0_(n) {}
    ExtReal(int n) : q0_(n) {}
    static ExtReal generator(const ContextPtr& ctx, const std::string& name);
    static ExtReal make(const Rat& q0, std::map<std::string, Rat> coeffs,
                        ContextPtr ctx);

    const Rat& rational_part() const { return q0_; }
    const std::map<std::string, Rat>& coeffs() const { return coeffs_; }
    const ContextPtr& context() const { return ctx_; }

    bool is_rational() const { return coeffs_.empty(); }
    const Rat& as_rational() const;
    mpz_class denominator() const;

    friend ExtReal operator+(const ExtReal& a, const ExtReal& b);
    friend ExtReal operator-(const ExtReal& a, const ExtReal& b);
    ExtReal operator-() const;
    friend ExtReal operator*(const Rat& q, const ExtReal& a);
    friend ExtReal operator*(long n, const ExtReal& a);
    ExtReal& operator+=(const ExtReal& o) { return *this = *this + o; }
    ExtReal& operator-=(const ExtReal& o) { return *this = *this - o; }

    bool operator==(const ExtReal& o) const {
        return q0_ == o.q0_ && coeffs_ == o.coeffs_;
    }
    bool operator!=(const ExtReal& o) const { return !(*this == o); }

    // -1, 0, +1.  Throws PrecisionExhausted when the context's refinement
    // budget runs out before the order resolves.
    int compare(const ExtReal& o) const;
    bool operator<(const ExtReal& o) const { return compare(o) < 0; }
    bool operator<=(const ExtReal& o) const { return compare(o) <= 0; }
    bool operator>(const ExtReal& o) const { return compare(o) > 0; }
    bool operator>=(const ExtReal& o) const { return compare(o) >= 0; }

    int sign() const;  // sign of the value; same failure mode as compare

    // Current interval for the value from cached enclosures (no refinement).
    Enclosure interval() const;
    double approx() const;
    std::string str() const;

private:
    Rat q0_;
    std::map<std::string, Rat> coeffs_;  // no zero entries
    ContextPtr ctx_;                     // null iff coeffs_ empty

    void normalize();
    static ContextPtr merge_contexts(const ExtReal& a, const ExtReal& b);
};

ExtReal min(const ExtReal& a, const ExtReal& b);
ExtReal max(const ExtReal& a, const ExtReal& b);

}  // namespace adjlab
