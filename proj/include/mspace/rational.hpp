#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mspace {

// Exact rational arithmetic. Interval endpoints are never floats: cover
// decisions on [0,1] compare endpoints exactly.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

inline std::string to_string(const Rational& r) {
  std::string s = r.numerator().str();
  if (r.denominator() != 1) {
    s += "/";
    s += r.denominator().str();
  }
  return s;
}

}  // namespace mspace
