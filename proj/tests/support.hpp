#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sarmruin/sarmanov.hpp"

namespace testing {

/// Asymptotic Kolmogorov p-value of the KS statistic D for n draws.
inline double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

/// KS distance between a sample and a continuous CDF.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

/// Tanh-sinh quadrature on a finite [a, b]; a different integrator from the
/// library's and robust to integrable endpoint singularities.
inline double oracle_integral(const std::function<double(double)>& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> ts(12);
  return ts.integrate(f, a, b, 1e-13);
}

inline sarmruin::SarmanovModel config_a(double theta = 1.0) {
  using namespace sarmruin;
  return SarmanovModel(RegularlyVaryingLaw(2.0, 1.0, SlowlyVaryingSpec::type_i(1.0)), DiscountLaw(UniformLaw{1.0}),
                       theta, KernelPair::fgm());
}

inline sarmruin::SarmanovModel uniform2_model() {
  using namespace sarmruin;
  return SarmanovModel(RegularlyVaryingLaw(2.0, 1.0, SlowlyVaryingSpec::type_i(1.0)), DiscountLaw(UniformLaw{2.0}),
                       1.0, KernelPair::fgm());
}

/// TypeIII loss (alpha = 1, U Weibull(0.5)) with the given discount law.
inline sarmruin::SarmanovModel type_iii_model(sarmruin::DiscountLaw g, double theta = 0.5) {
  using namespace sarmruin;
  return SarmanovModel(RegularlyVaryingLaw(1.0, 1.0, SlowlyVaryingSpec::type_iii(1.0, LongTailedLaw(WeibullTail{0.5, 1.0}))),
                       std::move(g), theta, KernelPair::fgm());
}

/// P[XY > x] for config-A-like models (Pareto alpha, x_m = 1, Uniform(0,b),
/// FGM): the u-integral of the copula density is done by hand, the v-integral
/// numerically.
inline double product_tail_oracle(double alpha, double b, double theta, double x) {
  auto inner = [&](double v) {
    const double y = b * v;
    const double t = x / y;
    if (t <= 1.0) return 1.0;
    const double u0 = 1.0 - std::pow(t, -alpha);  // X > t iff U > u0
    const double w = 1.0 - 2.0 * v;
    // int_{u0}^1 (1 + theta (1 - 2u) w) du
    return (1.0 - u0) + theta * w * ((1.0 - u0) - (1.0 - u0 * u0));
  };
  const double kink = std::min(1.0, x / b);
  if (kink >= 1.0) return oracle_integral(inner, 0.0, 1.0);
  return oracle_integral(inner, 0.0, kink) + oracle_integral(inner, kink, 1.0);
}

}  // namespace testing
