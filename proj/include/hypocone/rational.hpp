#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace hypocone {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

/// Parses "p/q", "p", or a finite decimal such as "-0.25". Throws
/// std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" for integers) form; round-trips through
/// parse_rational bit-exactly.
std::string format_rational(const Rational& q);

/// Exact conversion of a finite double (every double is a dyadic rational).
Rational rational_from_double(double x);

std::vector<double> to_doubles(const RationalVector& v);

bool is_zero_vector(const RationalVector& v);

}  // namespace hypocone
