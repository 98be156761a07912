#include "sarmruin/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sarmruin/errors.hpp"
#include "normal.hpp"

namespace sarmruin {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

double kernel_power_moment(const SarmanovModel& model, double p) {
  const auto& G = model.discount();
  if (model.kernels().is_fgm()) {
    if (const auto* u = std::get_if<UniformLaw>(&G.family())) {
      return std::pow(u->b, p) * (1.0 / (p + 1.0) - 2.0 / (p + 2.0));
    }
    if (const auto* bp = std::get_if<BoundedParetoLaw>(&G.family())) {
      // 1 - 2G(y) = (1 - 2/D) + (2/D) (lo/y)^a on [lo, hi], so the second
      // term needs E[Y^{p-a}] = k int y^{p-2a-1} dy.
      const double a = bp->index;
      const double norm = -std::expm1(a * std::log(bp->lo / bp->hi));
      const double k = a * std::pow(bp->lo, a) / norm;
      const double q = p - 2.0 * a;
      const double shifted = std::fabs(q) < 1e-14 ? k * std::log(bp->hi / bp->lo)
                                                   : k * (std::pow(bp->hi, q) - std::pow(bp->lo, q)) / q;
      return (1.0 - 2.0 / norm) * G.power_moment(p) + (2.0 / norm) * std::pow(bp->lo, a) * shifted;
    }
    if (const auto* ln = std::get_if<LognormalLaw>(&G.family())) {
      // E[e^{sZ} Phi(Z)] = e^{s^2/2} Phi(s / sqrt 2).
      const double s = p * ln->sigma;
      return G.power_moment(p) * (1.0 - 2.0 * detail::normal_tail(-s / std::numbers::sqrt2));
    }
  }
  const double bps[1] = {1.0};
  return G.expectation([&](double y) { return model.phi2(y) * std::pow(y, p); }, bps, {1e-13, 1e-12, 10000});
}

AsymptoticConstants breiman_constant(const SarmanovModel& model) {
  AsymptoticConstants c;
  c.alpha = model.alpha();
  c.theta = model.theta();
  c.d1 = model.d1();
  c.e_y_alpha = model.discount().power_moment(c.alpha);
  if (!std::isfinite(c.e_y_alpha)) throw HypothesisError("E[Y^alpha] < infinity violated");
  c.kernel_moment = kernel_power_moment(model, c.alpha);
  c.kappa = c.e_y_alpha + c.theta * c.d1 * c.kernel_moment;
  if (!(c.kappa > 0.0)) {
    throw ModelError("Breiman constant kappa = " + fmt(c.kappa) + " is not positive; the asymptotic is vacuous");
  }
  c.twisted_alpha_moment = twisted_law(model).power_moment(c.alpha);
  const double gap = std::fabs(c.twisted_alpha_moment - c.kappa);
  if (gap > 1e-8 * std::max(1.0, c.kappa)) {
    throw InternalError("kappa = " + fmt(c.kappa) + " disagrees with the twisted alpha-moment " +
                        fmt(c.twisted_alpha_moment));
  }
  return c;
}

double finite_horizon_factor(const AsymptoticConstants& c, unsigned n) {
  if (n < 1) throw DomainError("horizon n must be >= 1");
  const double e = c.e_y_alpha;
  if (std::fabs(e - 1.0) <= kUnitMomentTol) return static_cast<double>(n) * c.kappa;
  // (1 - e^n) / (1 - e) without cancellation near e = 1.
  const double geometric = std::expm1(static_cast<double>(n) * std::log(e)) / (e - 1.0);
  return geometric * c.kappa;
}

double finite_horizon_factor(const SarmanovModel& model, unsigned n) {
  return finite_horizon_factor(breiman_constant(model), n);
}

double infinite_horizon_factor(const AsymptoticConstants& c) {
  if (!(c.e_y_alpha < 1.0 - kUnitMomentTol)) {
    throw HypothesisError("E[Y^alpha] < 1 violated: E[Y^alpha] = " + fmt(c.e_y_alpha));
  }
  return c.kappa / (1.0 - c.e_y_alpha);
}

double infinite_horizon_factor(const SarmanovModel& model) { return infinite_horizon_factor(breiman_constant(model)); }

double predicted_tail_H_i(const SarmanovModel& model, const AsymptoticConstants& c, unsigned i, double x) {
  if (i < 1) throw DomainError("term index i must be >= 1");
  if (!(x >= model.loss().x_m())) throw DomainError("x must be >= x_m");
  return std::pow(c.e_y_alpha, static_cast<double>(i - 1)) * c.kappa * model.loss().tail(x);
}

double predicted_tail_H_i(const SarmanovModel& model, unsigned i, double x) {
  return predicted_tail_H_i(model, breiman_constant(model), i, x);
}

}  // namespace sarmruin
