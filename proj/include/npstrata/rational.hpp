#pragma once

#include <boost/rational.hpp>

#include <string>

namespace npstrata {

// Exact rational arithmetic.  Every quantity in this library is a slope or a
// lattice height with denominator bounded by 2g, so 64-bit components are
// far more than enough; no floating point is used anywhere.
using Rational = boost::rational<long long>;

// boost::rational keeps the denominator positive, so ceil is a one-liner.
inline long long rational_ceil(const Rational& q) {
  long long n = q.numerator(), d = q.denominator();
  long long t = n / d;
  return (n % d > 0) ? t + 1 : t;
}

inline std::string rational_str(const Rational& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

}  // namespace npstrata
