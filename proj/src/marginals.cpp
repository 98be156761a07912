#include "sarmruin/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "sarmruin/errors.hpp"
#include "sarmruin/parallel.hpp"
#include "sarmruin/rng.hpp"
#include "normal.hpp"
#include "overloaded.hpp"

namespace sarmruin {

using detail::Overloaded;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// LongTailedLaw

LongTailedLaw::LongTailedLaw(Family family) : family_(family) {
  std::visit(Overloaded{
                 [](const ParetoTail& p) {
                   if (!positive_finite(p.index) || !positive_finite(p.scale))
                     throw DomainError("Pareto long-tailed law needs index > 0 and scale > 0");
                 },
                 [](const WeibullTail& w) {
                   if (!(w.shape > 0.0 && w.shape < 1.0))
                     throw DomainError("Weibull long-tailed law needs shape in (0, 1), got " + fmt(w.shape));
                   if (!positive_finite(w.rate)) throw DomainError("Weibull long-tailed law needs rate > 0");
                 },
                 [](const LognormalTail& l) {
                   if (!std::isfinite(l.mu) || !positive_finite(l.sigma))
                     throw DomainError("lognormal long-tailed law needs finite mu and sigma > 0");
                 },
             },
             family_);
}

double LongTailedLaw::log_tail(double u) const {
  return std::visit(Overloaded{
                        [u](const ParetoTail& p) { return u <= p.scale ? 0.0 : p.index * std::log(p.scale / u); },
                        [u](const WeibullTail& w) { return u <= 0.0 ? 0.0 : -std::pow(w.rate * u, w.shape); },
                        [u](const LognormalTail& l) {
                          return u <= 0.0 ? 0.0 : detail::log_normal_tail((std::log(u) - l.mu) / l.sigma);
                        },
                    },
                    family_);
}

double LongTailedLaw::tail(double u) const {
  if (const auto* l = std::get_if<LognormalTail>(&family_)) {
    return u <= 0.0 ? 1.0 : detail::normal_tail((std::log(u) - l->mu) / l->sigma);
  }
  return std::exp(log_tail(u));
}

double LongTailedLaw::mean() const {
  return std::visit(Overloaded{
                        [](const ParetoTail& p) { return p.index > 1.0 ? p.index * p.scale / (p.index - 1.0) : kInf; },
                        [](const WeibullTail& w) { return std::tgamma(1.0 + 1.0 / w.shape) / w.rate; },
                        [](const LognormalTail& l) { return std::exp(l.mu + 0.5 * l.sigma * l.sigma); },
                    },
                    family_);
}

std::string LongTailedLaw::describe() const {
  return std::visit(Overloaded{
                        [](const ParetoTail& p) { return "Pareto(index=" + fmt(p.index) + ", scale=" + fmt(p.scale) + ")"; },
                        [](const WeibullTail& w) { return "Weibull(shape=" + fmt(w.shape) + ", rate=" + fmt(w.rate) + ")"; },
                        [](const LognormalTail& l) { return "Lognormal(mu=" + fmt(l.mu) + ", sigma=" + fmt(l.sigma) + ")"; },
                    },
                    family_);
}

// ---------------------------------------------------------------------------
// SlowlyVaryingSpec

std::string to_string(SvForm form) {
  switch (form) {
    case SvForm::TypeI: return "i";
    case SvForm::TypeII: return "ii";
    case SvForm::TypeIII: return "iii";
    case SvForm::TypeIV: return "iv";
  }
  return "?";
}

SlowlyVaryingSpec::SlowlyVaryingSpec(SvForm form, double c, std::optional<LongTailedLaw> u,
                                     std::optional<LongTailedLaw> v)
    : form_(form), c_(c), u_(std::move(u)), v_(std::move(v)) {
  if (!positive_finite(c_)) throw DomainError("slowly varying constant c must be positive and finite");
}

SlowlyVaryingSpec SlowlyVaryingSpec::type_i(double c) { return {SvForm::TypeI, c, std::nullopt, std::nullopt}; }
SlowlyVaryingSpec SlowlyVaryingSpec::type_ii(double c, LongTailedLaw v) {
  return {SvForm::TypeII, c, std::nullopt, std::move(v)};
}
SlowlyVaryingSpec SlowlyVaryingSpec::type_iii(double c, LongTailedLaw u) {
  return {SvForm::TypeIII, c, std::move(u), std::nullopt};
}
SlowlyVaryingSpec SlowlyVaryingSpec::type_iv(double c, LongTailedLaw u, LongTailedLaw v) {
  return {SvForm::TypeIV, c, std::move(u), std::move(v)};
}

double SlowlyVaryingSpec::raw_log_value(double log_x) const {
  double value = std::log(c_);
  if (u_) value += u_->log_tail(log_x);
  if (v_) value -= v_->log_tail(log_x);
  return value;
}

// ---------------------------------------------------------------------------
// RegularlyVaryingLaw

RegularlyVaryingLaw::RegularlyVaryingLaw(double alpha, double x_m, SlowlyVaryingSpec sv)
    : alpha_(alpha), x_m_(x_m), sv_(std::move(sv)) {
  if (!positive_finite(alpha_)) throw DomainError("tail index alpha must be positive and finite");
  if (!positive_finite(x_m_)) throw DomainError("left endpoint x_m must be positive and finite");
  raw_log_at_xm_ = sv_.raw_log_value(std::log(x_m_));
  if (!std::isfinite(raw_log_at_xm_)) throw DomainError("slowly varying part is degenerate at x_m");

  if (sv_.form() != SvForm::TypeI) {
    // The 1/P[V > log x] factor can outgrow x^{-alpha} close to x_m.
    constexpr int kPoints = 10000;
    const double t0 = std::log(x_m_);
    const double span = 12.0 * std::numbers::ln10;
    double previous = 0.0;
    for (int k = 1; k <= kPoints; ++k) {
      const double t = t0 + span * k / kPoints;
      const double lt = -alpha_ * (t - t0) + sv_.raw_log_value(t) - raw_log_at_xm_;
      if (!std::isfinite(lt)) throw DomainError("tail is not finite at x = " + fmt(std::exp(t)));
      if (lt > previous + 1e-12) {
        throw DomainError("tail x^-alpha L(x) increases near x = " + fmt(std::exp(t)) +
                          "; raise x_m so the law is a proper distribution");
      }
      previous = lt;
    }
  }
}

double RegularlyVaryingLaw::log_tail(double x) const {
  if (!(x > x_m_)) return 0.0;
  const double log_x = std::log(x);
  const double base = -alpha_ * (log_x - std::log(x_m_));
  if (sv_.form() == SvForm::TypeI) return base;
  return base + sv_.raw_log_value(log_x) - raw_log_at_xm_;
}

double RegularlyVaryingLaw::tail(double x) const {
  if (!(x > x_m_)) return 1.0;
  if (sv_.form() == SvForm::TypeI) return std::pow(x_m_ / x, alpha_);
  return std::exp(log_tail(x));
}

double RegularlyVaryingLaw::cdf(double x) const {
  if (!(x > x_m_)) return 0.0;
  return -std::expm1(log_tail(x));
}

double RegularlyVaryingLaw::slowly_varying(double x) const {
  if (!(x >= x_m_)) return std::pow(x, alpha_);
  const double head = std::pow(x_m_, alpha_);
  if (sv_.form() == SvForm::TypeI) return head;
  return head * std::exp(sv_.raw_log_value(std::log(x)) - raw_log_at_xm_);
}

namespace {

// Smallest x (to 1e-13 in log x) with log_tail(x) <= target, target < 0.
template <class LogTail>
double solve_log_tail(LogTail&& log_tail_at_log, double log_xm, double target) {
  double lo = log_xm;
  double width = 1.0;
  double hi = lo + width;
  while (log_tail_at_log(hi) > target) {
    lo = hi;
    width *= 2.0;
    hi = lo + width;
    if (hi > 700.0) throw NumericalError("quantile search left the double range");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (log_tail_at_log(mid) > target) lo = mid;
    else hi = mid;
  }
  return std::exp(hi);
}

}  // namespace

double RegularlyVaryingLaw::tail_quantile(double p) const {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("tail probability must lie in (0, 1], got " + fmt(p));
  if (p == 1.0) return x_m_;
  if (sv_.form() == SvForm::TypeI) return x_m_ * std::exp(-std::log(p) / alpha_);
  const double log_xm = std::log(x_m_);
  auto lt = [&](double t) { return -alpha_ * (t - log_xm) + sv_.raw_log_value(t) - raw_log_at_xm_; };
  return solve_log_tail(lt, log_xm, std::log(p));
}

double RegularlyVaryingLaw::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must lie in (0, 1), got " + fmt(u));
  const double log_p = std::log1p(-u);
  if (sv_.form() == SvForm::TypeI) return x_m_ * std::exp(-log_p / alpha_);
  const double log_xm = std::log(x_m_);
  auto lt = [&](double t) { return -alpha_ * (t - log_xm) + sv_.raw_log_value(t) - raw_log_at_xm_; };
  return solve_log_tail(lt, log_xm, log_p);
}

double RegularlyVaryingLaw::truncated_alpha_moment(double x) const {
  if (!(x >= x_m_)) throw DomainError("truncated moment needs x >= x_m");
  if (x == x_m_) return 0.0;
  if (sv_.form() == SvForm::TypeI) return alpha_ * std::pow(x_m_, alpha_) * std::log(x / x_m_);
  // m(x) = L(x_m) - L(x) + alpha * int_{log x_m}^{log x} L(e^t) dt
  auto integrand = [this](double t) { return slowly_varying(std::exp(t)); };
  const auto r = quad::integrate(integrand, std::log(x_m_), std::log(x));
  return slowly_varying(x_m_) - slowly_varying(x) + alpha_ * r.value;
}

double RegularlyVaryingLaw::power_moment(double p) const {
  if (!(p >= 0.0 && p < alpha_)) throw DomainError("E[X^p] is only finite for 0 <= p < alpha");
  if (p == 0.0) return 1.0;
  if (sv_.form() == SvForm::TypeI) return std::pow(x_m_, p) * alpha_ / (alpha_ - p);
  // E[X^p] = x_m^p + p * int_{log x_m}^inf e^{(p - alpha) t} L(e^t) dt
  auto integrand = [this, p](double t) {
    const double v = std::exp((p - alpha_) * t);
    return v == 0.0 ? 0.0 : v * slowly_varying(std::exp(t));
  };
  const auto r = quad::integrate_to_infinity(integrand, std::log(x_m_));
  return std::pow(x_m_, p) + p * r.value;
}

double RegularlyVaryingLaw::expectation(const std::function<double(double)>& h, const quad::Options& opts) const {
  auto integrand = [&](double p) { return h(tail_quantile(p)); };
  return quad::integrate(integrand, 0.0, 1.0, opts).value;
}

std::string RegularlyVaryingLaw::describe() const {
  std::string s = "RV(alpha=" + fmt(alpha_) + ", x_m=" + fmt(x_m_) + ", L type " + to_string(sv_.form()) +
                  ", c=" + fmt(sv_.c());
  if (sv_.u_law()) s += ", U=" + sv_.u_law()->describe();
  if (sv_.v_law()) s += ", V=" + sv_.v_law()->describe();
  return s + ")";
}

// ---------------------------------------------------------------------------
// DiscountLaw

DiscountLaw::DiscountLaw(Family family) : family_(family) {
  std::visit(Overloaded{
                 [](const UniformLaw& u) {
                   if (!positive_finite(u.b)) throw DomainError("Uniform(0, b) needs b > 0");
                 },
                 [](const ScaledBetaLaw& l) {
                   if (!positive_finite(l.a) || !positive_finite(l.b) || !positive_finite(l.scale))
                     throw DomainError("ScaledBeta needs a, b, scale > 0");
                 },
                 [](const BoundedParetoLaw& l) {
                   if (!positive_finite(l.index) || !positive_finite(l.lo) || !positive_finite(l.hi) || !(l.lo < l.hi))
                     throw DomainError("BoundedPareto needs index > 0 and 0 < lo < hi");
                 },
                 [](const LognormalLaw& l) {
                   if (!std::isfinite(l.mu) || !positive_finite(l.sigma))
                     throw DomainError("Lognormal needs finite mu and sigma > 0");
                 },
                 [](const PointMassLaw& l) {
                   if (!positive_finite(l.y0)) throw DomainError("PointMass needs y0 > 0");
                 },
             },
             family_);
}

bool DiscountLaw::is_continuous() const noexcept { return !std::holds_alternative<PointMassLaw>(family_); }

namespace {

double bounded_pareto_norm(const BoundedParetoLaw& l) { return -std::expm1(l.index * std::log(l.lo / l.hi)); }

}  // namespace

double DiscountLaw::cdf(double y) const {
  return std::visit(Overloaded{
                        [y](const UniformLaw& u) { return std::clamp(y / u.b, 0.0, 1.0); },
                        [y](const ScaledBetaLaw& l) {
                          const double z = y / l.scale;
                          if (z <= 0.0) return 0.0;
                          if (z >= 1.0) return 1.0;
                          return boost::math::ibeta(l.a, l.b, z);
                        },
                        [y](const BoundedParetoLaw& l) {
                          if (y <= l.lo) return 0.0;
                          if (y >= l.hi) return 1.0;
                          return -std::expm1(l.index * std::log(l.lo / y)) / bounded_pareto_norm(l);
                        },
                        [y](const LognormalLaw& l) {
                          return y <= 0.0 ? 0.0 : detail::normal_tail(-(std::log(y) - l.mu) / l.sigma);
                        },
                        [y](const PointMassLaw& l) { return y < l.y0 ? 0.0 : 1.0; },
                    },
                    family_);
}

double DiscountLaw::tail(double y) const {
  return std::visit(Overloaded{
                        [y](const UniformLaw& u) { return std::clamp(1.0 - y / u.b, 0.0, 1.0); },
                        [y](const ScaledBetaLaw& l) {
                          const double z = y / l.scale;
                          if (z <= 0.0) return 1.0;
                          if (z >= 1.0) return 0.0;
                          return boost::math::ibetac(l.a, l.b, z);
                        },
                        [y](const BoundedParetoLaw& l) {
                          if (y <= l.lo) return 1.0;
                          if (y >= l.hi) return 0.0;
                          return (std::pow(l.lo / y, l.index) - std::pow(l.lo / l.hi, l.index)) / bounded_pareto_norm(l);
                        },
                        [y](const LognormalLaw& l) {
                          return y <= 0.0 ? 1.0 : detail::normal_tail((std::log(y) - l.mu) / l.sigma);
                        },
                        [y](const PointMassLaw& l) { return y < l.y0 ? 1.0 : 0.0; },
                    },
                    family_);
}

double DiscountLaw::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must lie in (0, 1), got " + fmt(u));
  return std::visit(Overloaded{
                        [u](const UniformLaw& l) { return u * l.b; },
                        [u](const ScaledBetaLaw& l) { return l.scale * boost::math::ibeta_inv(l.a, l.b, u); },
                        [u](const BoundedParetoLaw& l) {
                          return l.lo * std::pow(1.0 - u * bounded_pareto_norm(l), -1.0 / l.index);
                        },
                        [u](const LognormalLaw& l) { return std::exp(l.mu + l.sigma * detail::normal_quantile(u)); },
                        [](const PointMassLaw& l) { return l.y0; },
                    },
                    family_);
}

double DiscountLaw::lower_endpoint() const {
  return std::visit(Overloaded{
                        [](const UniformLaw&) { return 0.0; },
                        [](const ScaledBetaLaw&) { return 0.0; },
                        [](const BoundedParetoLaw& l) { return l.lo; },
                        [](const LognormalLaw&) { return 0.0; },
                        [](const PointMassLaw& l) { return l.y0; },
                    },
                    family_);
}

double DiscountLaw::upper_endpoint() const {
  return std::visit(Overloaded{
                        [](const UniformLaw& l) { return l.b; },
                        [](const ScaledBetaLaw& l) { return l.scale; },
                        [](const BoundedParetoLaw& l) { return l.hi; },
                        [](const LognormalLaw&) { return kInf; },
                        [](const PointMassLaw& l) { return l.y0; },
                    },
                    family_);
}

double DiscountLaw::power_moment(double p) const {
  if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("power moment order must be finite and >= 0");
  if (p == 0.0) return 1.0;
  return std::visit(Overloaded{
                        [p](const UniformLaw& l) { return std::pow(l.b, p) / (p + 1.0); },
                        [p](const ScaledBetaLaw& l) {
                          using std::lgamma;
                          return std::pow(l.scale, p) *
                                 std::exp(lgamma(l.a + p) - lgamma(l.a) + lgamma(l.a + l.b) - lgamma(l.a + l.b + p));
                        },
                        [p](const BoundedParetoLaw& l) {
                          const double k = l.index * std::pow(l.lo, l.index) / bounded_pareto_norm(l);
                          const double q = p - l.index;
                          if (std::fabs(q) < 1e-14) return k * std::log(l.hi / l.lo);
                          return k * (std::pow(l.hi, q) - std::pow(l.lo, q)) / q;
                        },
                        [p](const LognormalLaw& l) { return std::exp(p * l.mu + 0.5 * p * p * l.sigma * l.sigma); },
                        [p](const PointMassLaw& l) { return std::pow(l.y0, p); },
                    },
                    family_);
}

DiscountLaw::LogMoments DiscountLaw::log_moments() const {
  if (const auto* u = std::get_if<UniformLaw>(&family_)) return {std::log(u->b) - 1.0, 1.0};
  if (const auto* l = std::get_if<LognormalLaw>(&family_)) return {l->mu, l->sigma * l->sigma};
  if (const auto* m = std::get_if<PointMassLaw>(&family_)) return {std::log(m->y0), 0.0};
  if (const auto* b = std::get_if<ScaledBetaLaw>(&family_)) {
    using namespace boost::math;
    return {std::log(b->scale) + digamma(b->a) - digamma(b->a + b->b), trigamma(b->a) - trigamma(b->a + b->b)};
  }
  const double mean = expectation([](double y) { return std::log(y); });
  const double var = expectation([mean](double y) {
    const double d = std::log(y) - mean;
    return d * d;
  });
  return {mean, var};
}

double DiscountLaw::expectation(const std::function<double(double)>& h, std::span<const double> breakpoints,
                                const quad::Options& opts) const {
  auto with_breaks = [&](double a, double b) {
    std::vector<double> pts{a};
    for (double v : breakpoints)
      if (v > a && v < b) pts.push_back(v);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    return pts;
  };

  return std::visit(
      Overloaded{
          [&](const UniformLaw& l) {
            const auto pts = with_breaks(0.0, l.b);
            return quad::integrate([&](double y) { return h(y) / l.b; }, pts, opts).value;
          },
          [&](const ScaledBetaLaw& l) {
            const boost::math::beta_distribution<> beta(l.a, l.b);
            const auto pts = with_breaks(0.0, l.scale);
            return quad::integrate([&](double y) { return h(y) * boost::math::pdf(beta, y / l.scale) / l.scale; }, pts,
                                   opts)
                .value;
          },
          [&](const BoundedParetoLaw& l) {
            const double k = l.index * std::pow(l.lo, l.index) / bounded_pareto_norm(l);
            const auto pts = with_breaks(l.lo, l.hi);
            return quad::integrate([&](double y) { return h(y) * k * std::pow(y, -l.index - 1.0); }, pts, opts).value;
          },
          [&](const LognormalLaw& l) {
            // z = (log y - mu) / sigma, then z = t / (1 - t^2) on (-1, 1).
            std::vector<double> pts{-1.0};
            for (double v : breakpoints) {
              if (!(v > 0.0) || !std::isfinite(v)) continue;
              const double z = (std::log(v) - l.mu) / l.sigma;
              pts.push_back(z == 0.0 ? 0.0 : (-1.0 + std::sqrt(1.0 + 4.0 * z * z)) / (2.0 * z));
            }
            pts.push_back(1.0);
            std::sort(pts.begin(), pts.end());
            auto integrand = [&](double t) {
              const double s = 1.0 - t * t;
              const double z = t / s;
              const double dens = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
              if (dens == 0.0) return 0.0;
              return h(std::exp(l.mu + l.sigma * z)) * dens * (1.0 + t * t) / (s * s);
            };
            return quad::integrate(integrand, pts, opts).value;
          },
          [&](const PointMassLaw& l) { return h(l.y0); },
      },
      family_);
}

DiscountLaw DiscountLaw::scaled(double c) const {
  if (!positive_finite(c)) throw DomainError("scale factor must be positive");
  return DiscountLaw(std::visit(Overloaded{
                                    [c](const UniformLaw& l) -> Family { return UniformLaw{l.b * c}; },
                                    [c](const ScaledBetaLaw& l) -> Family { return ScaledBetaLaw{l.a, l.b, l.scale * c}; },
                                    [c](const BoundedParetoLaw& l) -> Family {
                                      return BoundedParetoLaw{l.index, l.lo * c, l.hi * c};
                                    },
                                    [c](const LognormalLaw& l) -> Family { return LognormalLaw{l.mu + std::log(c), l.sigma}; },
                                    [c](const PointMassLaw& l) -> Family { return PointMassLaw{l.y0 * c}; },
                                },
                                family_));
}

std::string DiscountLaw::describe() const {
  return std::visit(Overloaded{
                        [](const UniformLaw& l) { return "Uniform(0, " + fmt(l.b) + ")"; },
                        [](const ScaledBetaLaw& l) {
                          return "ScaledBeta(a=" + fmt(l.a) + ", b=" + fmt(l.b) + ", scale=" + fmt(l.scale) + ")";
                        },
                        [](const BoundedParetoLaw& l) {
                          return "BoundedPareto(index=" + fmt(l.index) + ", lo=" + fmt(l.lo) + ", hi=" + fmt(l.hi) + ")";
                        },
                        [](const LognormalLaw& l) { return "Lognormal(mu=" + fmt(l.mu) + ", sigma=" + fmt(l.sigma) + ")"; },
                        [](const PointMassLaw& l) { return "PointMass(" + fmt(l.y0) + ")"; },
                    },
                    family_);
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

template <class Law>
std::vector<double> sample_blocks(const Law& law, std::size_t n, std::uint64_t seed, unsigned workers) {
  std::vector<double> out(n);
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
  parallel_for(blocks, workers, [&](std::size_t block) {
    Stream stream(seed, block);
    const std::size_t begin = block * kSampleBlock;
    const std::size_t end = std::min(n, begin + kSampleBlock);
    for (std::size_t i = begin; i < end; ++i) out[i] = law.quantile(stream.uniform());
  });
  return out;
}

}  // namespace

std::vector<double> sample_iid(const RegularlyVaryingLaw& law, std::size_t n, std::uint64_t seed, unsigned workers) {
  return sample_blocks(law, n, seed, workers);
}

std::vector<double> sample_iid(const DiscountLaw& law, std::size_t n, std::uint64_t seed, unsigned workers) {
  return sample_blocks(law, n, seed, workers);
}

}  // namespace sarmruin
