#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace sostrat {

/// Exact rational scalar. Backed by an arbitrary-precision integer pair kept
/// normalized (positive denominator, gcd 1) by the backend.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Rational rat(long long num, long long den = 1) { return Rational(num, den); }

inline Integer num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer den(const Rational& r) { return boost::multiprecision::denominator(r); }

/// gcd on rationals, unique up to sign: gcd(a/b, c/d) = gcd(a*d, c*b)/(b*d).
/// Used to normalize polynomial contents.
inline Rational rational_gcd(const Rational& x, const Rational& y) {
  if (x == 0) return y < 0 ? Rational(-y) : y;
  if (y == 0) return x < 0 ? Rational(-x) : x;
  Integer g = boost::multiprecision::gcd(num(x) * den(y), num(y) * den(x));
  return Rational(g, den(x) * den(y));
}

inline std::string to_string(const Rational& r) {
  std::string s = num(r).str();
  if (den(r) != 1) s += "/" + den(r).str();
  return s;
}

/// Parses "n" or "n/d". Returns nullopt on malformed input or zero denominator.
inline std::optional<Rational> parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(s));
    Integer n(s.substr(0, slash)), d(s.substr(slash + 1));
    if (d == 0) return std::nullopt;
    return Rational(n, d);
  } catch (...) {
    return std::nullopt;
  }
}

}  // namespace sostrat
