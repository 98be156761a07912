#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sarmruin/quadrature.hpp"

namespace sarmruin {

// ---------------------------------------------------------------------------
// Long-tailed laws U, V that modulate the slowly varying part of F.
// ---------------------------------------------------------------------------

/// P[U > u] = (scale / u)^index for u >= scale.
struct ParetoTail {
  double index;
  double scale;
};

/// P[U > u] = exp(-(rate * u)^shape), shape in (0, 1).
struct WeibullTail {
  double shape;
  double rate;
};

/// log U ~ Normal(mu, sigma^2).
struct LognormalTail {
  double mu;
  double sigma;
};

class LongTailedLaw {
 public:
  using Family = std::variant<ParetoTail, WeibullTail, LognormalTail>;

  explicit LongTailedLaw(Family family);

  double tail(double u) const;
  /// log P[U > u]; finite far beyond where tail() underflows.
  double log_tail(double u) const;
  /// E[U]; +inf for Pareto with index <= 1.
  double mean() const;

  const Family& family() const noexcept { return family_; }
  std::string describe() const;

 private:
  Family family_;
};

// ---------------------------------------------------------------------------
// Slowly varying modulation L and the regularly varying loss law F.
// ---------------------------------------------------------------------------

/// The four admissible shapes of L:
///   I   L = c
///   II  L = c / P[V > log x]
///   III L = c P[U > log x]
///   IV  L = c P[U > log x] / P[V > log x]
enum class SvForm { TypeI, TypeII, TypeIII, TypeIV };

std::string to_string(SvForm form);

class SlowlyVaryingSpec {
 public:
  static SlowlyVaryingSpec type_i(double c);
  static SlowlyVaryingSpec type_ii(double c, LongTailedLaw v);
  static SlowlyVaryingSpec type_iii(double c, LongTailedLaw u);
  static SlowlyVaryingSpec type_iv(double c, LongTailedLaw u, LongTailedLaw v);

  SvForm form() const noexcept { return form_; }
  double c() const noexcept { return c_; }
  const std::optional<LongTailedLaw>& u_law() const noexcept { return u_; }
  const std::optional<LongTailedLaw>& v_law() const noexcept { return v_; }

  /// log L(x) before normalization at the left endpoint, as a function of
  /// log x.
  double raw_log_value(double log_x) const;

 private:
  SlowlyVaryingSpec(SvForm form, double c, std::optional<LongTailedLaw> u,
                    std::optional<LongTailedLaw> v);

  SvForm form_;
  double c_;
  std::optional<LongTailedLaw> u_;
  std::optional<LongTailedLaw> v_;
};

/// Law of a nonnegative loss X with P[X > x] = x^{-alpha} L(x) on [x_m, inf).
///
/// The tail is renormalized so that P[X > x_m] = 1 exactly; below x_m the
/// tail is 1. Construction rejects parameter sets whose normalized tail
/// would increase somewhere on [x_m, x_m * 1e12].
class RegularlyVaryingLaw {
 public:
  RegularlyVaryingLaw(double alpha, double x_m, SlowlyVaryingSpec sv);

  double alpha() const noexcept { return alpha_; }
  double x_m() const noexcept { return x_m_; }
  const SlowlyVaryingSpec& sv() const noexcept { return sv_; }

  double tail(double x) const;
  double log_tail(double x) const;
  double cdf(double x) const;
  /// Normalized slowly varying part x^alpha * tail(x). Exactly x_m^alpha for
  /// type I on [x_m, inf).
  double slowly_varying(double x) const;

  /// inf{x : cdf(x) >= u}, u in (0, 1).
  double quantile(double u) const;
  /// inf{x : tail(x) <= p}, p in (0, 1]. Accurate for p far below 1e-16.
  double tail_quantile(double p) const;

  /// m(x) = int_0^x v^alpha F(dv); requires x >= x_m.
  double truncated_alpha_moment(double x) const;
  /// E[X^p] for 0 <= p < alpha.
  double power_moment(double p) const;

  /// E[h(X)] by quadrature over the tail-probability scale.
  double expectation(const std::function<double(double)>& h, const quad::Options& opts = {}) const;

  std::string describe() const;

 private:
  double alpha_;
  double x_m_;
  SlowlyVaryingSpec sv_;
  double raw_log_at_xm_;
};

// ---------------------------------------------------------------------------
// Discount-factor law G.
// ---------------------------------------------------------------------------

struct UniformLaw {
  double b;  ///< support (0, b]
};
struct ScaledBetaLaw {
  double a;
  double b;
  double scale;  ///< Y = scale * Beta(a, b)
};
struct BoundedParetoLaw {
  double index;
  double lo;
  double hi;
};
struct LognormalLaw {
  double mu;
  double sigma;
};
struct PointMassLaw {
  double y0;
};

class DiscountLaw {
 public:
  using Family = std::variant<UniformLaw, ScaledBetaLaw, BoundedParetoLaw, LognormalLaw, PointMassLaw>;

  explicit DiscountLaw(Family family);

  const Family& family() const noexcept { return family_; }
  bool is_continuous() const noexcept;
  bool is_uniform() const noexcept { return std::holds_alternative<UniformLaw>(family_); }

  double tail(double y) const;
  double cdf(double y) const;
  double quantile(double u) const;
  double lower_endpoint() const;
  /// Upper end of the support; +inf for the lognormal.
  double upper_endpoint() const;

  /// E[Y^p], closed form for every catalog member.
  double power_moment(double p) const;

  /// E[log Y] and Var[log Y].
  struct LogMoments {
    double mean;
    double variance;
  };
  LogMoments log_moments() const;

  /// E[h(Y)] by adaptive quadrature against the density (or exact for a
  /// point mass). `breakpoints` are y-values where h has kinks.
  double expectation(const std::function<double(double)>& h, std::span<const double> breakpoints = {},
                     const quad::Options& opts = {}) const;

  /// Returns a copy of this law rescaled to the law of c*Y.
  DiscountLaw scaled(double c) const;

  std::string describe() const;

 private:
  Family family_;
};

/// n i.i.d. inverse-CDF draws; identical for identical (law, n, seed).
std::vector<double> sample_iid(const RegularlyVaryingLaw& law, std::size_t n, std::uint64_t seed,
                               unsigned workers = 1);
std::vector<double> sample_iid(const DiscountLaw& law, std::size_t n, std::uint64_t seed,
                               unsigned workers = 1);

/// Number of draws that share one substream in every sampler.
inline constexpr std::size_t kSampleBlock = 4096;

}  // namespace sarmruin
