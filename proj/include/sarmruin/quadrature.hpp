#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace sarmruin::quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  std::size_t max_subdivisions = 10000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t subdivisions = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 21-point Gauss–Kronrod on [a, b].
///
/// Converges when the summed error estimate drops below
/// max(abs_tol, rel_tol * |value|). Running out of subdivisions throws
/// NumericalError; there is no best-effort fallback.
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Same, on [points.front(), points.back()] with the interior points used as
/// initial breakpoints (kinks, support endpoints).
Result integrate(const Integrand& f, std::span<const double> points, const Options& opts = {});

/// Integral over [a, inf) through x = a + t / (1 - t).
Result integrate_to_infinity(const Integrand& f, double a, const Options& opts = {});

/// Integral over the real line through x = t / (1 - t^2).
Result integrate_real_line(const Integrand& f, const Options& opts = {});

}  // namespace sarmruin::quad
