#pragma once

#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

namespace sarmruin::detail {

inline double normal_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// log P[N(0,1) > z], usable deep into the upper tail.
inline double log_normal_tail(double z) {
  if (z < 30.0) return std::log(normal_tail(z));
  const double z2 = z * z;
  return -0.5 * z2 - std::log(z * std::sqrt(2.0 * std::numbers::pi)) + std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
}

inline double normal_quantile(double u) {
  static const boost::math::normal_distribution<> standard;
  return boost::math::quantile(standard, u);
}

}  // namespace sarmruin::detail
