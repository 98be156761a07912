#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sarmruin/marginals.hpp"

namespace sarmruin {

using KernelFn = std::function<double(double)>;

/// The kernels phi1, phi2 of the Sarmanov density factor 1 + theta phi1 phi2.
///
/// FGM derives both from the marginals (phi = 1 - 2 * CDF, b1 = b2 = 1,
/// d1 = -1). Custom kernels carry user-declared bounds and the declared limit
/// d1 = lim phi1(x); validate() spot-checks the declarations.
class KernelPair {
 public:
  static KernelPair fgm();
  static KernelPair custom(KernelFn phi1, KernelFn phi2, double b1, double b2, double d1,
                           std::string description = "custom");

  bool is_fgm() const noexcept { return fgm_; }
  const KernelFn& custom_phi1() const noexcept { return phi1_; }
  const KernelFn& custom_phi2() const noexcept { return phi2_; }
  double declared_b1() const noexcept { return b1_; }
  double declared_b2() const noexcept { return b2_; }
  double declared_d1() const noexcept { return d1_; }
  const std::string& description() const noexcept { return description_; }

 private:
  KernelPair() = default;

  bool fgm_ = true;
  KernelFn phi1_;
  KernelFn phi2_;
  double b1_ = 1.0;
  double b2_ = 1.0;
  double d1_ = -1.0;
  std::string description_ = "fgm";
};

/// Joint law (1 + theta phi1(x) phi2(y)) F(dx) G(dy) of one period's
/// (loss, discount) pair. Immutable; construction does not validate, see
/// validate().
class SarmanovModel {
 public:
  SarmanovModel(RegularlyVaryingLaw loss, DiscountLaw discount, double theta, KernelPair kernels);

  const RegularlyVaryingLaw& loss() const noexcept { return loss_; }
  const DiscountLaw& discount() const noexcept { return discount_; }
  double theta() const noexcept { return theta_; }
  const KernelPair& kernels() const noexcept { return kernels_; }
  double alpha() const noexcept { return loss_.alpha(); }

  double phi1(double x) const;
  double phi2(double y) const;
  double b1() const noexcept { return kernels_.declared_b1(); }
  double b2() const noexcept { return kernels_.declared_b2(); }
  double d1() const noexcept { return kernels_.declared_d1(); }

  /// Same kernels and theta over different marginals (FGM kernels follow the
  /// new marginals automatically).
  SarmanovModel with_discount(DiscountLaw discount) const;
  SarmanovModel with_theta(double theta) const;

  std::string describe() const;

 private:
  RegularlyVaryingLaw loss_;
  DiscountLaw discount_;
  double theta_;
  KernelPair kernels_;
};

struct ConstraintCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ConstraintCheck> checks;
  std::vector<std::string> warnings;
  double centering_residual_x = 0.0;
  double centering_residual_y = 0.0;
  /// 1 - |theta| b1 b2; negative margins may still pass the grid search.
  double positivity_margin = 0.0;

  bool valid() const;
  /// First failed check, formatted for error messages; empty when valid.
  std::string first_failure() const;
};

/// Checks centering, boundedness, positivity and the declared limit d1.
ValidationReport validate(const SarmanovModel& model);

/// Throws ModelError naming the first violated constraint.
void require_valid(const SarmanovModel& model);

struct JointDraw {
  double x;
  double y;
};

/// n i.i.d. draws from the joint law. FGM uses the exact conditional
/// inverse CDF; custom kernels use rejection from F x G with envelope
/// 1 + |theta| b1 b2. Output depends only on (model, n, seed).
std::vector<JointDraw> sample_joint(const SarmanovModel& model, std::size_t n, std::uint64_t seed,
                                    unsigned workers = 1);

/// Draws pairs from the joint law out of a stream of uniforms. Shared by
/// sample_joint and the path simulators; one instance per worker, since the
/// rejection path keeps acceptance counters.
class JointSampler {
 public:
  explicit JointSampler(const SarmanovModel& model);

  template <class Uniform>
  JointDraw draw(Uniform&& uniform);

  /// Aborts below this acceptance rate once kMinAttempts proposals were made.
  static constexpr double kMinAcceptance = 0.01;
  static constexpr std::uint64_t kMinAttempts = 10000;

 private:
  JointDraw fgm_draw(double u, double w) const;
  void check_acceptance() const;

  const SarmanovModel& model_;
  double envelope_;
  std::uint64_t attempts_ = 0;
  std::uint64_t accepted_ = 0;
};

/// I(t) = int_t^inf phi1(u) F(du), for t >= x_m.
double kernel_tail_integral(const SarmanovModel& model, double t);

/// P[X > t | Y = y] = Fbar(t) + theta phi2(y) I(t). Returns 1 for t below
/// x_m, where X > t surely.
double conditional_tail_x_given_y(const SarmanovModel& model, double y, double t);

/// The reweighted discount law (1 + theta d1 phi2(y)) G(dy).
class TwistedLaw {
 public:
  explicit TwistedLaw(const SarmanovModel& model);

  double theta_d1() const noexcept { return theta_d1_; }
  double density_ratio(double y) const;
  double total_mass() const;
  double tail(double y) const;
  /// E[(Y*_theta)^p] by quadrature on the quantile scale of G.
  double power_moment(double p) const;

 private:
  double integrate_over_levels(const std::function<double(double)>& h, double from_level) const;

  DiscountLaw base_;
  double theta_d1_;
  KernelFn phi2_;
};

TwistedLaw twisted_law(const SarmanovModel& model);

/// Grid of quantile levels used by every construction-time spot check:
/// 10^4 midpoints plus 1e-12 and 1 - 1e-12.
std::vector<double> spot_check_levels();

// ---------------------------------------------------------------------------

template <class Uniform>
JointDraw JointSampler::draw(Uniform&& uniform) {
  if (model_.kernels().is_fgm()) {
    const double u = uniform();
    const double w = uniform();
    return fgm_draw(u, w);
  }
  const double theta = model_.theta();
  for (;;) {
    const double x = model_.loss().quantile(uniform());
    const double y = model_.discount().quantile(uniform());
    const double accept = (1.0 + theta * model_.phi1(x) * model_.phi2(y)) / envelope_;
    ++attempts_;
    if (uniform() <= accept) {
      ++accepted_;
      return {x, y};
    }
    if (attempts_ >= kMinAttempts) check_acceptance();
  }
}

}  // namespace sarmruin
