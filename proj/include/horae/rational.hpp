#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace horae {

/// Exact arbitrary-precision rational used for timestamp arithmetic.
using Rational = boost::multiprecision::cpp_rational;

/// Parses `digits ('.' digits)? ('/' digits)?`. Throws InvalidArgument on
/// anything else.
Rational parse_rational(std::string_view text);

/// Exact conversion of a finite binary64 value.
Rational rational_from_double(double value);

double rational_to_double(const Rational& value);

/// Decimal rendering when the expansion terminates ("3.5"), otherwise
/// "p/q". Always non-negative input expected by the printer; the sign is
/// emitted as a leading '-' otherwise.
std::string format_rational(const Rational& value);

} // namespace horae
