#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sarmruin/asymptotics.hpp"
#include "sarmruin/sarmanov.hpp"

namespace sarmruin {

enum class Method { Exact, Crude, Conditional };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

/// One simulation result. `std_error` comes from 100 batch means.
struct MCEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  Method method = Method::Crude;
  std::uint64_t seed = 0;
  std::optional<unsigned> truncation_index;
  std::optional<double> remainder_bound;
};

/// Running state of one discounted-loss path.
struct PathState {
  double discount = 1.0;  ///< zeta: product of the discount factors drawn so far
  double partial_sum = 0.0;
  double running_max = 0.0;
  unsigned steps = 0;

  void advance(double loss, double discount_factor) {
    discount *= discount_factor;
    partial_sum += loss * discount;
    if (steps == 0 || partial_sum > running_max) running_max = partial_sum;
    ++steps;
  }
};

struct EstimatorSettings {
  Method method = Method::Conditional;
  std::uint64_t n_samples = 1000000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double tail_tol = 0.01;  ///< infinite horizon only
};

/// Number of batches behind every standard error (fewer when n_samples < 100).
inline constexpr std::uint64_t kBatches = 100;

/// P[XY > x] by quadrature of the conditional tail against G. Also checks the
/// closed form when one applies (see exact_product_tail_closed_form).
double exact_product_tail(const SarmanovModel& model, double x);

/// kappa Fbar(x) + theta x_m^{2a} x^{-2a} E[phi2(Y) Y^{2a}] for FGM, type I L
/// and G bounded by x / x_m; empty otherwise.
std::optional<double> exact_product_tail_closed_form(const SarmanovModel& model, double x);

MCEstimate product_tail_mc(const SarmanovModel& model, double x, const EstimatorSettings& settings);

/// Conditional estimator of Hbar_i(x) = P[X_i Y_1 ... Y_i > x].
MCEstimate estimate_H_i(const SarmanovModel& model, unsigned i, double x, const EstimatorSettings& settings);

/// Psi(x, n). Crude: indicator of the path maximum. Conditional: sum of the
/// per-term conditional tails along one discount path (an estimate of
/// sum_i Hbar_i(x), which matches Psi only asymptotically).
MCEstimate estimate_finite_ruin(const SarmanovModel& model, double x, unsigned n, const EstimatorSettings& settings);

/// Truncation plan for the infinite horizon.
struct TruncationPlan {
  unsigned horizon = 0;
  double p = 0.0;           ///< moment order used by the bound
  double rho = 0.0;         ///< E[Y^p]
  double product_moment = 0.0;  ///< E[(XY)^p]
  double remainder_bound = 0.0;
};

/// E[(XY)^p] = E[X^p] E[Y^p] + theta E[phi1(X) X^p] E[phi2(Y) Y^p], p < alpha.
double product_power_moment(const SarmanovModel& model, double p);

/// Smallest N with x^{-p} E[(XY)^p] rho^N / (1 - rho) <= tail_tol kappa Fbar(x).
TruncationPlan plan_truncation(const SarmanovModel& model, const AsymptoticConstants& constants, double x,
                               double tail_tol);

/// Psi(x) through a horizon-N truncation with an explicit remainder bound.
/// Requires E[Y^alpha] < 1 and E[log Y] < 0.
MCEstimate estimate_infinite_ruin(const SarmanovModel& model, double x, const EstimatorSettings& settings);

struct Horizon {
  enum class Kind { Product, Finite, Infinite };
  Kind kind = Kind::Product;
  unsigned n = 1;

  static Horizon product() { return {Kind::Product, 1}; }
  static Horizon finite(unsigned n) { return {Kind::Finite, n}; }
  static Horizon infinite() { return {Kind::Infinite, 0}; }
};

struct CurveRow {
  double x = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double tail_F = 0.0;
  double ratio = 0.0;
  double predicted = 0.0;
  double rel_err = 0.0;
  std::optional<unsigned> truncation_index;
  std::optional<double> remainder_bound;
};

/// Estimate / Fbar(x) against the predicted constant along an increasing grid.
/// Every grid point reuses the same seed.
std::vector<CurveRow> ratio_curve(const SarmanovModel& model, std::span<const double> x_grid, Horizon horizon,
                                  const EstimatorSettings& settings);

}  // namespace sarmruin
