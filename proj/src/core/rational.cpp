#include "horae/rational.hpp"

#include "horae/error.hpp"

#include <cctype>
#include <cmath>

namespace horae {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) {
    return false;
  }
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return true;
}

boost::multiprecision::cpp_int parse_integer(std::string_view s) {
  boost::multiprecision::cpp_int value = 0;
  for (char c : s) {
    value = value * 10 + (c - '0');
  }
  return value;
}

} // namespace

Rational parse_rational(std::string_view text) {
  std::string_view num = text;
  std::string_view den;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
    if (!all_digits(den)) {
      throw InvalidArgument("malformed number: " + std::string(text));
    }
  }
  std::string_view whole = num;
  std::string_view frac;
  if (auto dot = num.find('.'); dot != std::string_view::npos) {
    whole = num.substr(0, dot);
    frac = num.substr(dot + 1);
    if (!all_digits(frac)) {
      throw InvalidArgument("malformed number: " + std::string(text));
    }
  }
  if (!all_digits(whole)) {
    throw InvalidArgument("malformed number: " + std::string(text));
  }
  boost::multiprecision::cpp_int scale = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) {
    scale *= 10;
  }
  Rational value(parse_integer(whole) * scale + parse_integer(frac), scale);
  if (!den.empty()) {
    auto d = parse_integer(den);
    if (d == 0) {
      throw InvalidArgument("division by zero in number: " + std::string(text));
    }
    value /= Rational(d);
  }
  return value;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) {
    throw InvalidArgument("non-finite value");
  }
  int exponent = 0;
  double mantissa = std::frexp(value, &exponent);
  // 53 significant bits fit exactly in an int64 after scaling.
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational result(scaled);
  boost::multiprecision::cpp_int power = 1;
  power <<= std::abs(exponent);
  if (exponent >= 0) {
    result *= Rational(power);
  } else {
    result /= Rational(power);
  }
  return result;
}

double rational_to_double(const Rational& value) { return value.convert_to<double>(); }

std::string format_rational(const Rational& value) {
  using boost::multiprecision::cpp_int;
  cpp_int num = boost::multiprecision::numerator(value);
  cpp_int den = boost::multiprecision::denominator(value);
  std::string sign;
  if (num < 0) {
    sign = "-";
    num = -num;
  }
  if (den == 1) {
    return sign + num.str();
  }
  // Terminating decimal iff the denominator has no prime factors besides 2, 5.
  cpp_int rest = den;
  int twos = 0;
  int fives = 0;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) {
    return sign + num.str() + "/" + den.str();
  }
  int digits = std::max(twos, fives);
  cpp_int scale = 1;
  for (int i = 0; i < digits; ++i) {
    scale *= 10;
  }
  cpp_int scaled = num * (scale / den);
  std::string body = scaled.str();
  if (body.size() <= static_cast<std::size_t>(digits)) {
    body.insert(0, static_cast<std::size_t>(digits) + 1 - body.size(), '0');
  }
  body.insert(body.size() - static_cast<std::size_t>(digits), ".");
  return sign + body;
}

} // namespace horae
