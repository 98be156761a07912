#pragma once

#include "sarmruin/sarmanov.hpp"

namespace sarmruin {

/// Right-hand-side constants of the tail asymptotics for one model.
struct AsymptoticConstants {
  double alpha = 0.0;
  double theta = 0.0;
  double d1 = 0.0;
  double e_y_alpha = 0.0;      ///< E[Y^alpha]
  double kernel_moment = 0.0;  ///< E[phi2(Y) Y^alpha]
  double kappa = 0.0;          ///< E[Y^alpha] + theta d1 E[phi2(Y) Y^alpha]
  double twisted_alpha_moment = 0.0;  ///< E[(Y*_theta)^alpha], independent quadrature
};

/// E[phi2(Y) Y^p]. Closed form for FGM over the uniform, bounded Pareto and
/// lognormal discount laws; quadrature otherwise.
double kernel_power_moment(const SarmanovModel& model, double p);

/// kappa and its ingredients, cross-checked against the twisted law.
/// Throws ModelError when kappa <= 0 and InternalError when the two routes
/// disagree by more than 1e-8.
AsymptoticConstants breiman_constant(const SarmanovModel& model);

/// Limit of Psi(x, n) / Fbar(x): kappa (1 - E^n) / (1 - E), or n kappa when
/// |E[Y^alpha] - 1| <= 1e-12.
double finite_horizon_factor(const AsymptoticConstants& constants, unsigned n);
double finite_horizon_factor(const SarmanovModel& model, unsigned n);

/// Limit of Psi(x) / Fbar(x) = kappa / (1 - E[Y^alpha]); requires E[Y^alpha] < 1.
double infinite_horizon_factor(const AsymptoticConstants& constants);
double infinite_horizon_factor(const SarmanovModel& model);

/// (E[Y^alpha])^{i-1} kappa Fbar(x).
double predicted_tail_H_i(const SarmanovModel& model, const AsymptoticConstants& constants, unsigned i, double x);
double predicted_tail_H_i(const SarmanovModel& model, unsigned i, double x);

/// Threshold below which E[Y^alpha] counts as exactly 1.
inline constexpr double kUnitMomentTol = 1e-12;

}  // namespace sarmruin
