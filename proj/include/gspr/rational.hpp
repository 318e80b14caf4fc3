#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gspr {

// Exact rational scalar. Always stored reduced with positive denominator;
// boost's rational adaptor maintains both invariants.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rational_of(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  return Rational(Integer(num), Integer(den));
}

inline bool is_zero(const Rational& r) { return r.is_zero(); }

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// Integral powers, negative exponents allowed for nonzero base.
inline Rational pow(const Rational& base, long long e) {
  if (e < 0) {
    if (base.is_zero()) throw std::domain_error("rational: 0^negative");
    return Rational(1) / pow(base, -e);
  }
  Rational acc(1), b = base;
  while (e > 0) {
    if (e & 1) acc *= b;
    b *= b;
    e >>= 1;
  }
  return acc;
}

inline std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace gspr
