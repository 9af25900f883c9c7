#pragma once

#include <cfloat>
#include <cmath>
#include <span>
#include <limits>
#include <utility>

namespace kteka {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = 0.69314718055994530942;
inline const double kLog3 = std::log(3.0);

// log(exp(a) + exp(b)), symmetric in its arguments.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

inline double row_max(std::span<const double> r) {
  double mx = 0.0;
  for (double v : r) mx = mx < v ? v : mx;
  return mx;
}

// Rescale a non-negative row so its maximum lies in [2^-256, 2^256],
// accumulating the power-of-two exponent removed (exact in binary floating
// point). Returns false when the row has no usable mass: all zero,
// subnormal, or overflowed.
inline bool renormalize_row(std::span<double> r, long& exponent) {
  const double mx = row_max(r);
  if (!(mx >= DBL_MIN) || !std::isfinite(mx)) return false;
  if (mx < 0x1p-256 || mx > 0x1p256) {
    const int e = std::ilogb(mx) + 1;
    for (double& v : r) v = std::ldexp(v, -e);
    exponent += e;
  }
  return true;
}

}  // namespace kteka
