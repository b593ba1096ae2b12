#pragma once

// Scalar types every generic field is instantiated with, plus overloads of
// the elementary functions under one name so generic code can call
// math::sqrt(x) regardless of the scalar type.

#include <boost/multiprecision/float128.hpp>
#include <cmath>

#include "finsler/derivjet/jet.hpp"

namespace finsler {

using Quad = boost::multiprecision::float128;
using derivjet::Jet;

namespace math {

inline double sqrt(double x) { return std::sqrt(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double pow(double x, double p) { return std::pow(x, p); }

inline Quad sqrt(const Quad& x) { return boost::multiprecision::sqrt(x); }
inline Quad exp(const Quad& x) { return boost::multiprecision::exp(x); }
inline Quad log(const Quad& x) { return boost::multiprecision::log(x); }
inline Quad sin(const Quad& x) { return boost::multiprecision::sin(x); }
inline Quad cos(const Quad& x) { return boost::multiprecision::cos(x); }
inline Quad pow(const Quad& x, double p) {
  if (p == std::floor(p) && std::abs(p) <= 64) {
    Quad r = 1;
    const int n = static_cast<int>(std::abs(p));
    for (int i = 0; i < n; ++i) r *= x;
    return p < 0 ? Quad(1) / r : r;
  }
  return boost::multiprecision::pow(x, Quad(p));
}

using derivjet::cos;
using derivjet::exp;
using derivjet::log;
using derivjet::pow;
using derivjet::sin;
using derivjet::sqrt;

inline double primal(double x) noexcept { return x; }
inline double primal(const Quad& x) { return static_cast<double>(x); }
using derivjet::primal;

template <class T>
T square(const T& x) {
  return x * x;
}

/// Integer power by repeated multiplication (n >= 0).
template <class T>
T ipow(const T& x, int n) {
  T r = T(1.0);
  for (int i = 0; i < n; ++i) r = r * x;
  return r;
}

}  // namespace math
}  // namespace finsler
