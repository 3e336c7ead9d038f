#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace qam {

// All arithmetic in this project is exact. mpq_class keeps values in
// canonical lowest terms with a positive denominator.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rat(long num, long den = 1) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Parses "num/den" or a bare integer.
inline Rational parse_rational(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0) {
        throw std::invalid_argument("not a rational: '" + s + "'");
    }
    if (q.get_den() == 0) {
        throw std::invalid_argument("zero denominator: '" + s + "'");
    }
    q.canonicalize();
    return q;
}

// Always renders with an explicit denominator ("3/1", "-2/5") so that
// exact output round-trips through parse_rational.
inline std::string to_fraction_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Display-only decimal approximation, 12 significant digits.
std::string to_decimal_string(const Rational& q, int significant_digits = 12);

}  // namespace qam
