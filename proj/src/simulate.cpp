#include "sarmruin/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sarmruin/errors.hpp"
#include "sarmruin/parallel.hpp"
#include "sarmruin/rng.hpp"

namespace sarmruin {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

/// Splits n_samples over min(100, n) batches, each with its own substream,
/// and folds the batch sums in batch order. `batch(stream, count)` returns
/// the sum of `count` per-sample values.
template <class Batch>
MCEstimate run_batches(const EstimatorSettings& settings, Method method, Batch&& batch) {
  const std::uint64_t n = settings.n_samples;
  if (n < 1) throw DomainError("n_samples must be >= 1");
  const std::uint64_t batches = std::min(kBatches, n);
  std::vector<double> sums(batches, 0.0);
  std::vector<std::uint64_t> sizes(batches, 0);
  for (std::uint64_t b = 0; b < batches; ++b) sizes[b] = n / batches + (b < n % batches ? 1 : 0);

  parallel_for(batches, settings.workers, [&](std::size_t b) {
    Stream stream(settings.seed, b);
    sums[b] = batch(stream, sizes[b]);
  });

  double total = 0.0;
  for (double s : sums) total += s;
  MCEstimate est;
  est.value = total / static_cast<double>(n);
  est.n_samples = n;
  est.method = method;
  est.seed = settings.seed;
  if (batches >= 2) {
    double mean = 0.0;
    for (std::uint64_t b = 0; b < batches; ++b) mean += sums[b] / static_cast<double>(sizes[b]);
    mean /= static_cast<double>(batches);
    double ss = 0.0;
    for (std::uint64_t b = 0; b < batches; ++b) {
      const double d = sums[b] / static_cast<double>(sizes[b]) - mean;
      ss += d * d;
    }
    est.std_error = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  }
  return est;
}

// Sum over one discount path of the per-term conditional tails, terms 1..horizon.
double conditional_path_sum(const SarmanovModel& model, double x, unsigned horizon, PathRng& path) {
  const auto& G = model.discount();
  double zeta = 1.0;
  double sum = 0.0;
  for (unsigned i = 0; i < horizon; ++i) {
    const double y = G.quantile(path.uniform());
    zeta *= y;
    sum += conditional_tail_x_given_y(model, y, x / zeta);
  }
  return sum;
}

// Indicator that a crude path exceeds x within `horizon` steps.
double crude_path_hit(JointSampler& sampler, double x, unsigned horizon, PathRng& path) {
  PathState state;
  auto uniform = [&path] { return path.uniform(); };
  for (unsigned k = 0; k < horizon; ++k) {
    const JointDraw d = sampler.draw(uniform);
    state.advance(d.x, d.y);
  }
  return state.running_max > x ? 1.0 : 0.0;
}

MCEstimate path_estimate(const SarmanovModel& model, double x, unsigned horizon, const EstimatorSettings& settings) {
  if (settings.method == Method::Crude) {
    return run_batches(settings, Method::Crude, [&](Stream& stream, std::uint64_t count) {
      JointSampler sampler(model);
      double hits = 0.0;
      for (std::uint64_t s = 0; s < count; ++s) {
        PathRng path(stream.bits());
        hits += crude_path_hit(sampler, x, horizon, path);
      }
      return hits;
    });
  }
  if (settings.method == Method::Conditional) {
    return run_batches(settings, Method::Conditional, [&](Stream& stream, std::uint64_t count) {
      double acc = 0.0;
      for (std::uint64_t s = 0; s < count; ++s) {
        PathRng path(stream.bits());
        acc += conditional_path_sum(model, x, horizon, path);
      }
      return acc;
    });
  }
  throw DomainError("method '" + to_string(settings.method) + "' is not a Monte Carlo estimator");
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::Exact: return "exact";
    case Method::Crude: return "crude";
    case Method::Conditional: return "conditional";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  if (name == "exact") return Method::Exact;
  if (name == "crude") return Method::Crude;
  if (name == "conditional") return Method::Conditional;
  throw DomainError("unknown estimator method '" + name + "' (expected exact, crude or conditional)");
}

// ---------------------------------------------------------------------------

std::optional<double> exact_product_tail_closed_form(const SarmanovModel& model, double x) {
  const auto& F = model.loss();
  const auto& G = model.discount();
  if (!model.kernels().is_fgm() || F.sv().form() != SvForm::TypeI || !G.is_continuous()) return std::nullopt;
  if (!(G.upper_endpoint() <= x / F.x_m())) return std::nullopt;
  const double a = F.alpha();
  const double r = std::pow(F.x_m() / x, a);
  const double theta = model.theta();
  return r * (G.power_moment(a) - theta * kernel_power_moment(model, a)) +
         theta * r * r * kernel_power_moment(model, 2.0 * a);
}

double exact_product_tail(const SarmanovModel& model, double x) {
  const auto& F = model.loss();
  if (!(x >= F.x_m())) throw DomainError("exact product tail needs x >= x_m");
  const double scale = F.tail(x);
  const double kink[1] = {x / F.x_m()};
  const quad::Options opts{1e-13 * scale, 1e-11, 10000};
  const double value = model.discount().expectation(
      [&](double y) { return conditional_tail_x_given_y(model, y, x / y); }, kink, opts);

  if (const auto closed = exact_product_tail_closed_form(model, x)) {
    if (std::fabs(*closed - value) > 1e-10) {
      throw InternalError("product tail quadrature " + fmt(value) + " disagrees with the closed form " + fmt(*closed));
    }
  }
  return value;
}

MCEstimate product_tail_mc(const SarmanovModel& model, double x, const EstimatorSettings& settings) {
  if (!(x > 0.0)) throw DomainError("x must be positive");
  return path_estimate(model, x, 1, settings);
}

MCEstimate estimate_H_i(const SarmanovModel& model, unsigned i, double x, const EstimatorSettings& settings) {
  if (i < 1) throw DomainError("term index i must be >= 1");
  if (!(x > 0.0)) throw DomainError("x must be positive");
  const auto& G = model.discount();
  return run_batches(settings, Method::Conditional, [&](Stream& stream, std::uint64_t count) {
    double acc = 0.0;
    for (std::uint64_t s = 0; s < count; ++s) {
      PathRng path(stream.bits());
      double zeta = 1.0;
      double y = 1.0;
      for (unsigned j = 0; j < i; ++j) {
        y = G.quantile(path.uniform());
        zeta *= y;
      }
      acc += conditional_tail_x_given_y(model, y, x / zeta);
    }
    return acc;
  });
}

MCEstimate estimate_finite_ruin(const SarmanovModel& model, double x, unsigned n, const EstimatorSettings& settings) {
  if (n < 1) throw DomainError("horizon n must be >= 1");
  if (!(x >= 0.0)) throw DomainError("x must be nonnegative");
  if (settings.method == Method::Conditional && !(x > 0.0)) throw DomainError("conditional estimator needs x > 0");
  return path_estimate(model, x, n, settings);
}

// ---------------------------------------------------------------------------

double product_power_moment(const SarmanovModel& model, double p) {
  const auto& F = model.loss();
  const double a = F.alpha();
  if (!(p > 0.0 && p < a)) throw DomainError("E[(XY)^p] needs 0 < p < alpha");
  double kernel_x;
  if (model.kernels().is_fgm() && F.sv().form() == SvForm::TypeI) {
    // phi1 = 2 Fbar - 1 and E[Fbar(X) X^p] = a x_m^p / (2a - p).
    const double xp = std::pow(F.x_m(), p);
    kernel_x = 2.0 * a * xp / (2.0 * a - p) - a * xp / (a - p);
  } else {
    kernel_x = F.expectation([&](double v) { return model.phi1(v) * std::pow(v, p); });
  }
  return F.power_moment(p) * model.discount().power_moment(p) + model.theta() * kernel_x * kernel_power_moment(model, p);
}

TruncationPlan plan_truncation(const SarmanovModel& model, const AsymptoticConstants& constants, double x,
                               double tail_tol) {
  if (!(tail_tol > 0.0)) throw DomainError("tail_tol must be positive");
  if (!(x > 0.0)) throw DomainError("x must be positive");
  TruncationPlan plan;
  plan.p = std::min(model.alpha(), 1.0) / 2.0;
  plan.rho = model.discount().power_moment(plan.p);
  if (!(plan.rho < 1.0)) {
    throw HypothesisError("E[Y^p] < 1 violated at p = " + fmt(plan.p) + "; the truncation bound does not contract");
  }
  plan.product_moment = product_power_moment(model, plan.p);
  const double target = tail_tol * constants.kappa * model.loss().tail(x);
  const double base = std::pow(x, -plan.p) * plan.product_moment / (1.0 - plan.rho);
  double n = 1.0;
  if (base * plan.rho > target) n = std::ceil(std::log(target / base) / std::log(plan.rho));
  if (!(n <= 1e6)) throw NumericalError("truncation horizon exceeds 10^6 terms");
  plan.horizon = static_cast<unsigned>(n);
  plan.remainder_bound = base * std::pow(plan.rho, n);
  return plan;
}

MCEstimate estimate_infinite_ruin(const SarmanovModel& model, double x, const EstimatorSettings& settings) {
  const auto constants = breiman_constant(model);
  if (!(constants.e_y_alpha < 1.0 - kUnitMomentTol)) {
    throw HypothesisError("E[Y^alpha] < 1 violated: E[Y^alpha] = " + fmt(constants.e_y_alpha));
  }
  const double mean_log = model.discount().log_moments().mean;
  if (!(mean_log < 0.0)) {
    throw HypothesisError("E[log Y] < 0 violated: E[log Y] = " + fmt(mean_log) + "; sup_n S_n may be infinite");
  }
  const auto plan = plan_truncation(model, constants, x, settings.tail_tol);
  MCEstimate est = path_estimate(model, x, plan.horizon, settings);
  est.truncation_index = plan.horizon;
  est.remainder_bound = plan.remainder_bound;
  return est;
}

// ---------------------------------------------------------------------------

std::vector<CurveRow> ratio_curve(const SarmanovModel& model, std::span<const double> x_grid, Horizon horizon,
                                  const EstimatorSettings& settings) {
  if (x_grid.empty()) throw DomainError("x grid is empty");
  for (std::size_t k = 1; k < x_grid.size(); ++k)
    if (!(x_grid[k] > x_grid[k - 1])) throw DomainError("x grid must be strictly increasing");

  const auto constants = breiman_constant(model);
  double predicted = constants.kappa;
  if (horizon.kind == Horizon::Kind::Finite) predicted = finite_horizon_factor(constants, horizon.n);
  if (horizon.kind == Horizon::Kind::Infinite) predicted = infinite_horizon_factor(constants);

  std::vector<CurveRow> rows;
  rows.reserve(x_grid.size());
  for (double x : x_grid) {
    CurveRow row;
    row.x = x;
    row.tail_F = model.loss().tail(x);
    row.predicted = predicted;
    switch (horizon.kind) {
      case Horizon::Kind::Product:
        if (settings.method == Method::Exact) {
          row.estimate = exact_product_tail(model, x);
        } else {
          const auto est = product_tail_mc(model, x, settings);
          row.estimate = est.value;
          row.std_error = est.std_error;
        }
        break;
      case Horizon::Kind::Finite: {
        const auto est = estimate_finite_ruin(model, x, horizon.n, settings);
        row.estimate = est.value;
        row.std_error = est.std_error;
        break;
      }
      case Horizon::Kind::Infinite: {
        const auto est = estimate_infinite_ruin(model, x, settings);
        row.estimate = est.value;
        row.std_error = est.std_error;
        row.truncation_index = est.truncation_index;
        row.remainder_bound = est.remainder_bound;
        break;
      }
    }
    row.ratio = row.estimate / row.tail_F;
    row.rel_err = std::fabs(row.ratio - row.predicted) / row.predicted;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace sarmruin
