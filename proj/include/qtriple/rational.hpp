#pragma once

#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace qtriple {

// Exact arbitrary-precision rational coefficients. GMP keeps values in
// lowest terms with a positive denominator, which is exactly the invariant
// the series layer relies on.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "p", "-p" or "p/r" with an arbitrary-precision integer p and a
// nonzero integer r.
inline Rational rational_from_string(const std::string& text) {
    mpq_class r;
    if (r.set_str(text, 10) != 0)
        throw std::invalid_argument("malformed rational literal: '" + text + "'");
    if (r.get_den() == 0)
        throw std::invalid_argument("rational with zero denominator: '" + text + "'");
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) {
    return r.get_str();
}

} // namespace qtriple
