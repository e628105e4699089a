#include "adjlab/rational.hpp"

#include <cctype>

#include "adjlab/errors.hpp"

namespace adjlab {

Rat parse_rational(const std::string& text) {
    // GMP tolerates whitespace and partial garbage; reject it up front.
    if (text.empty()) throw InputError("empty rational literal");
    for (char c : text) {
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '-' && c != '/')
            throw InputError("bad rational literal: \"" + text + "\"");
    }
    Rat q;
    if (q.set_str(text, 10) != 0)
        throw InputError("bad rational literal: \"" + text + "\"");
    if (q.get_den() == 0) throw InputError("zero denominator: \"" + text + "\"");
    q.canonicalize();
    return q;
}

std::string to_string(const Rat& q) { return q.get_str(); }

}  // namespace adjlab
