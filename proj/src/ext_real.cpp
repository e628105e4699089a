#include "adjlab/ext_real.hpp"

#include <utility>

#include "adjlab/errors.hpp"

namespace adjlab {

ContextPtr GeneratorContext::create() {
    return std::make_shared<GeneratorContext>();
}

void GeneratorContext::declare(const std::string& name, Enclosure initial,
                               Refiner refiner) {
    std::lock_guard<std::mutex> lock(mu_);
    if (gens_.count(name))
        throw InputError("generator already declared: " + name);
    if (!(initial.lo < initial.hi))
        throw InputError("generator enclosure must satisfy lo < hi: " + name);
    if (!refiner) throw InputError("generator needs a refiner: " + name);
    gens_.emplace(name, Gen{std::move(initial), std::move(refiner)});
}

void GeneratorContext::declare_sqrt(const std::string& name,
                                    const Rat& radicand) {
    Rat q = radicand;
    q.canonicalize();
    if (q <= 0) throw InputError("sqrt generator needs a positive radicand");
    if (mpz_perfect_square_p(q.get_num().get_mpz_t()) &&
        mpz_perfect_square_p(q.get_den().get_mpz_t()))
        throw InputError("radicand " + to_string(q) +
                         " is a perfect square; the generator would be "
                         "rational, not independent");
    // q/(q+1) < sqrt(q) < q+1 for every positive q; endpoints are rational,
    // sqrt(q) is not, so the bounds are strict.
    Enclosure initial{q / (q + 1), q + 1};
    Refiner bisect = [q](const Enclosure& e) {
        Rat mid = (e.lo + e.hi) / 2;
        if (mid * mid > q) return Enclosure{e.lo, mid};
        return Enclosure{mid, e.hi};
    };
    declare(name, std::move(initial), std::move(bisect));
}

bool GeneratorContext::has(const std::string& name) const {
    std::lock_guard<std::mutex> lock(mu_);
    return gens_.count(name) > 0;
}

Enclosure GeneratorContext::enclosure(const std::string& name) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = gens_.find(name);
    if (it == gens_.end()) throw InputError("unknown generator: " + name);
    return it->second.enc;
}

void GeneratorContext::refine(const std::string& name) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = gens_.find(name);
    if (it == gens_.end()) throw InputError("unknown generator: " + name);
    const Enclosure& old = it->second.enc;
    Enclosure next = it->second.refine(old);
    bool inside = old.lo <= next.lo && next.lo < next.hi && next.hi <= old.hi;
    bool halved = 2 * (next.hi - next.lo) <= old.hi - old.lo;
    if (!inside || !halved)
        throw Error("refiner contract violated for generator " + name);
    it->second.enc = std::move(next);
}

std::vector<std::string> GeneratorContext::names() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<std::string> out;
    out.reserve(gens_.size());
    for (const auto& [name, gen] : gens_) out.push_back(name);
    return out;
}

int GeneratorContext::budget() const {
    std::lock_guard<std::mutex> lock(mu_);
    return budget_;
}

void GeneratorContext::set_budget(int refinements) {
    if (refinements < 0) throw InputError("refinement budget must be >= 0");
    std::lock_guard<std::mutex> lock(mu_);
    budget_ = refinements;
}

ExtReal ExtReal::generator(const ContextPtr& ctx, const std::string& name) {
    if (!ctx || !ctx->has(name))
        throw InputError("undeclared generator: " + name);
    ExtReal g;
    g.coeffs_[name] = 1;
    g.ctx_ = ctx;
    return g;
}

ExtReal ExtReal::make(const Rat& q0, std::map<std::string, Rat> coeffs,
                      ContextPtr ctx) {
    ExtReal v;
    v.q0_ = q0;
    v.q0_.canonicalize();
    v.coeffs_ = std::move(coeffs);
    for (auto& [name, q] : v.coeffs_) {
        q.canonicalize();
        if (!ctx || !ctx->has(name))
            throw InputError("undeclared generator: " + name);
    }
    v.ctx_ = std::move(ctx);
    v.normalize();
    return v;
}

void ExtReal::normalize() {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (it->second == 0)
            it = coeffs_.erase(it);
        else
            ++it;
    }
    if (coeffs_.empty()) ctx_.reset();
}

ContextPtr ExtReal::merge_contexts(const ExtReal& a, const ExtReal& b) {
    if (a.ctx_ && b.ctx_ && a.ctx_ != b.ctx_)
        throw ContextMismatch("values come from different generator contexts");
    return a.ctx_ ? a.ctx_ : b.ctx_;
}

const Rat& ExtReal::as_rational() const {
    if (!is_rational())
        throw NotRational("value " + str() + " is not rational");
    return q0_;
}

mpz_class ExtReal::denominator() const { return as_rational().get_den(); }

ExtReal operator+(const ExtReal& a, const ExtReal& b) {
    ExtReal r;
    r.ctx_ = ExtReal::merge_contexts(a, b);
    r.q0_ = a.q0_ + b.q0_;
    r.coeffs_ = a.coeffs_;
    for (const auto& [name, q] : b.coeffs_) r.coeffs_[name] += q;
    r.normalize();
    return r;
}

ExtReal operator-(const ExtReal& a, const ExtReal& b) { return a + (-b); }

ExtReal ExtReal::operator-() const {
    ExtReal r = *this;
    r.q0_ = -r.q0_;
    for (auto& [name, q] : r.coeffs_) q = -q;
    return r;
}

ExtReal operator*(const Rat& q, const ExtReal& a) {
    Rat s = q;
    s.canonicalize();
    ExtReal r;
    r.q0_ = s * a.q0_;
    if (s != 0) {
        r.ctx_ = a.ctx_;
        r.coeffs_ = a.coeffs_;
        for (auto& [name, c] : r.coeffs_) c *= s;
    }
    r.normalize();
    return r;
}

ExtReal operator*(long n, const ExtReal& a) { return Rat(n) * a; }

Enclosure ExtReal::interval() const {
    Enclosure out{q0_, q0_};
    for (const auto& [name, q] : coeffs_) {
        Enclosure e = ctx_->enclosure(name);
        if (q > 0) {
            out.lo += q * e.lo;
            out.hi += q * e.hi;
        } else {
            out.lo += q * e.hi;
            out.hi += q * e.lo;
        }
    }
    return out;
}

int ExtReal::compare(const ExtReal& o) const {
    ExtReal diff = *this - o;
    if (diff.is_rational()) return sgn(diff.q0_);
    ContextPtr ctx = diff.ctx_;
    const int budget = ctx->budget();
    int used = 0;
    for (;;) {
        Enclosure iv = diff.interval();
        if (iv.lo > 0) return 1;
        if (iv.hi < 0) return -1;
        if (used >= budget)
            throw PrecisionExhausted(
                "comparison unresolved after " + std::to_string(used) +
                " refinements (value " + diff.str() + ")");
        // Refine the generator contributing the widest scaled interval.
        const std::string* widest = nullptr;
        Rat widest_width;
        for (const auto& [name, q] : diff.coeffs_) {
            Enclosure e = ctx->enclosure(name);
            Rat w = abs(q) * (e.hi - e.lo);
            if (!widest || w > widest_width) {
                widest = &name;
                widest_width = w;
            }
        }
        ctx->refine(*widest);
        ++used;
    }
}

int ExtReal::sign() const { return compare(ExtReal()); }

double ExtReal::approx() const {
    Enclosure iv = interval();
    Rat mid = (iv.lo + iv.hi) / 2;
    return mid.get_d();
}

std::string ExtReal::str() const {
    if (is_rational()) return to_string(q0_);
    std::string out;
    if (q0_ != 0) out = to_string(q0_);
    for (const auto& [name, q] : coeffs_) {
        if (out.empty()) {
            out = (q < 0 ? "-" : "");
        } else {
            out += (q < 0 ? " - " : " + ");
        }
        out += to_string(abs(q)) + "·" + name;
    }
    return out;
}

ExtReal min(const ExtReal& a, const ExtReal& b) {
    return a.compare(b) <= 0 ? a : b;
}

ExtReal max(const ExtReal& a, const ExtReal& b) {
    return a.compare(b) >= 0 ? a : b;
}

}  // namespace adjlab
