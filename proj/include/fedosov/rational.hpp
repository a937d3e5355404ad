#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace fedosov {

/// Exact rational scalar. Always kept in canonical form (reduced, denominator > 0).
using Rational = mpq_class;

struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw StructuralError("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Parses "p/q" or "p".
inline Rational rat_from_string(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw StructuralError("unparsable rational: " + s);
    q.canonicalize();
    return q;
}

inline std::string rat_to_string(const Rational& q) { return q.get_str(); }

inline Rational factorial(long n) {
    Rational r = 1;
    for (long i = 2; i <= n; ++i) r *= i;
    return r;
}

} // namespace fedosov
