#include "sarmruin/sarmanov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sarmruin/errors.hpp"
#include "sarmruin/parallel.hpp"
#include "sarmruin/rng.hpp"

namespace sarmruin {

namespace {

constexpr double kCenteringTol = 1e-8;
constexpr double kBoundSlack = 1e-12;
constexpr double kLimitWarnTol = 0.01;
constexpr int kSpotLevels = 10000;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

KernelPair KernelPair::fgm() { return KernelPair{}; }

KernelPair KernelPair::custom(KernelFn phi1, KernelFn phi2, double b1, double b2, double d1, std::string description) {
  if (!phi1 || !phi2) throw DomainError("custom kernels need both phi1 and phi2");
  if (!(b1 > 0.0 && std::isfinite(b1)) || !(b2 > 0.0 && std::isfinite(b2)))
    throw DomainError("declared kernel bounds b1, b2 must be positive and finite");
  if (!std::isfinite(d1)) throw DomainError("declared limit d1 must be finite");
  if (std::fabs(d1) > b1) throw DomainError("declared limit d1 exceeds the declared bound b1");
  KernelPair k;
  k.fgm_ = false;
  k.phi1_ = std::move(phi1);
  k.phi2_ = std::move(phi2);
  k.b1_ = b1;
  k.b2_ = b2;
  k.d1_ = d1;
  k.description_ = std::move(description);
  return k;
}

SarmanovModel::SarmanovModel(RegularlyVaryingLaw loss, DiscountLaw discount, double theta, KernelPair kernels)
    : loss_(std::move(loss)), discount_(std::move(discount)), theta_(theta), kernels_(std::move(kernels)) {
  if (!std::isfinite(theta_)) throw DomainError("theta must be finite");
}

double SarmanovModel::phi1(double x) const {
  if (kernels_.is_fgm()) return 2.0 * loss_.tail(x) - 1.0;
  return kernels_.custom_phi1()(x);
}

double SarmanovModel::phi2(double y) const {
  if (kernels_.is_fgm()) return 1.0 - 2.0 * discount_.cdf(y);
  return kernels_.custom_phi2()(y);
}

SarmanovModel SarmanovModel::with_discount(DiscountLaw discount) const {
  return SarmanovModel(loss_, std::move(discount), theta_, kernels_);
}

SarmanovModel SarmanovModel::with_theta(double theta) const { return SarmanovModel(loss_, discount_, theta, kernels_); }

std::string SarmanovModel::describe() const {
  return "Sarmanov(F=" + loss_.describe() + ", G=" + discount_.describe() + ", theta=" + fmt(theta_) +
         ", kernels=" + kernels_.description() + ")";
}

// ---------------------------------------------------------------------------

std::vector<double> spot_check_levels() {
  std::vector<double> levels;
  levels.reserve(kSpotLevels + 2);
  levels.push_back(1e-12);
  for (int k = 0; k < kSpotLevels; ++k) levels.push_back((k + 0.5) / kSpotLevels);
  levels.push_back(1.0 - 1e-12);
  return levels;
}

bool ValidationReport::valid() const {
  return std::all_of(checks.begin(), checks.end(), [](const ConstraintCheck& c) { return c.passed; });
}

std::string ValidationReport::first_failure() const {
  for (const auto& c : checks)
    if (!c.passed) return c.name + ": " + c.detail;
  return {};
}

ValidationReport validate(const SarmanovModel& model) {
  ValidationReport report;
  const auto& F = model.loss();
  const auto& G = model.discount();
  const auto levels = spot_check_levels();

  // Kernel values on the quantile grids of both marginals. The top F level
  // goes through the tail scale so it reaches the far tail.
  std::vector<double> phi1_values;
  std::vector<double> phi2_values;
  phi1_values.reserve(levels.size());
  phi2_values.reserve(levels.size());
  for (double u : levels) {
    const double x = u > 0.5 ? F.tail_quantile(1.0 - u) : F.quantile(u);
    phi1_values.push_back(model.phi1(x));
    phi2_values.push_back(model.phi2(G.quantile(u)));
  }
  const auto [min1, max1] = std::minmax_element(phi1_values.begin(), phi1_values.end());
  const auto [min2, max2] = std::minmax_element(phi2_values.begin(), phi2_values.end());

  // Centering.
  quad::Options tight{1e-11, 1e-10, 10000};
  report.centering_residual_x = F.expectation([&](double x) { return model.phi1(x); }, tight);
  report.centering_residual_y = G.expectation([&](double y) { return model.phi2(y); }, {}, tight);
  report.checks.push_back({"E[phi1(X)] = 0", std::fabs(report.centering_residual_x) <= kCenteringTol,
                           report.centering_residual_x,
                           "centering residual " + fmt(report.centering_residual_x) + " (tolerance 1e-8)"});
  report.checks.push_back({"E[phi2(Y)] = 0", std::fabs(report.centering_residual_y) <= kCenteringTol,
                           report.centering_residual_y,
                           "centering residual " + fmt(report.centering_residual_y) + " (tolerance 1e-8)"});

  // Declared bounds.
  const double sup1 = std::max(std::fabs(*min1), std::fabs(*max1));
  const double sup2 = std::max(std::fabs(*min2), std::fabs(*max2));
  report.checks.push_back({"|phi1(x)| <= b1", std::isfinite(sup1) && sup1 <= model.b1() + kBoundSlack, sup1,
                           "grid sup |phi1| = " + fmt(sup1) + ", declared b1 = " + fmt(model.b1())});
  report.checks.push_back({"|phi2(y)| <= b2", std::isfinite(sup2) && sup2 <= model.b2() + kBoundSlack, sup2,
                           "grid sup |phi2| = " + fmt(sup2) + ", declared b2 = " + fmt(model.b2())});

  // Positivity of the density factor.
  const double theta = model.theta();
  report.positivity_margin = 1.0 - std::fabs(theta) * model.b1() * model.b2();
  double grid_min = 1.0;
  for (double p : {*min1, *max1})
    for (double q : {*min2, *max2}) grid_min = std::min(grid_min, 1.0 + theta * p * q);
  const bool positive = report.positivity_margin >= 0.0 || grid_min >= -kBoundSlack;
  report.checks.push_back({"1+theta*phi1(x)*phi2(y) >= 0", positive, report.positivity_margin,
                           positive ? "margin 1-|theta|b1b2 = " + fmt(report.positivity_margin)
                                    : "violated: margin 1-|theta|b1b2 = " + fmt(report.positivity_margin) +
                                          ", grid minimum of the density factor = " + fmt(grid_min)});

  // Declared limit d1, checked at the 1 - 1e-6 quantile (warning only).
  const double far_phi1 = model.phi1(F.tail_quantile(1e-6));
  if (std::fabs(far_phi1 - model.d1()) > kLimitWarnTol) {
    report.warnings.push_back("phi1 at the 1-1e-6 quantile is " + fmt(far_phi1) + ", declared d1 = " +
                              fmt(model.d1()));
  }
  return report;
}

void require_valid(const SarmanovModel& model) {
  const auto report = validate(model);
  if (!report.valid()) throw ModelError("invalid Sarmanov model: " + report.first_failure());
}

// ---------------------------------------------------------------------------

JointSampler::JointSampler(const SarmanovModel& model)
    : model_(model), envelope_(1.0 + std::fabs(model.theta()) * model.b1() * model.b2()) {}

JointDraw JointSampler::fgm_draw(double u, double w) const {
  const double x = model_.loss().quantile(u);
  // Conditional CDF of the second copula coordinate: v + a v (1 - v) = w.
  const double a = model_.theta() * (1.0 - 2.0 * u);
  const double one_plus = 1.0 + a;
  const double disc = std::max(0.0, one_plus * one_plus - 4.0 * a * w);
  double v = 2.0 * w / (one_plus + std::sqrt(disc));
  v = std::clamp(v, 0x1.0p-60, 1.0 - 0x1.0p-53);
  return {x, model_.discount().quantile(v)};
}

void JointSampler::check_acceptance() const {
  const double rate = static_cast<double>(accepted_) / static_cast<double>(attempts_);
  if (rate < kMinAcceptance) {
    throw NumericalError("rejection sampler acceptance rate " + fmt(rate) + " below 1% after " +
                         std::to_string(attempts_) + " proposals; check the declared kernel bounds b1, b2");
  }
}

std::vector<JointDraw> sample_joint(const SarmanovModel& model, std::size_t n, std::uint64_t seed, unsigned workers) {
  std::vector<JointDraw> out(n);
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
  parallel_for(blocks, workers, [&](std::size_t block) {
    Stream stream(seed, block);
    JointSampler sampler(model);
    auto uniform = [&stream] { return stream.uniform(); };
    const std::size_t begin = block * kSampleBlock;
    const std::size_t end = std::min(n, begin + kSampleBlock);
    for (std::size_t i = begin; i < end; ++i) out[i] = sampler.draw(uniform);
  });
  return out;
}

// ---------------------------------------------------------------------------

double kernel_tail_integral(const SarmanovModel& model, double t) {
  const auto& F = model.loss();
  if (!(t >= F.x_m())) throw DomainError("kernel tail integral needs t >= x_m");
  if (model.kernels().is_fgm()) return -F.cdf(t) * F.tail(t);
  const double tail_t = F.tail(t);
  if (tail_t == 0.0) return 0.0;
  // p = tail_t * s keeps the tolerance relative to the size of the tail.
  auto integrand = [&](double s) { return model.phi1(F.tail_quantile(tail_t * s)); };
  const auto r = quad::integrate(integrand, 0.0, 1.0, {1e-12, 1e-10, 10000});
  return tail_t * r.value;
}

double conditional_tail_x_given_y(const SarmanovModel& model, double y, double t) {
  const auto& F = model.loss();
  if (t < F.x_m()) return 1.0;
  double value;
  if (model.kernels().is_fgm()) {
    // Fbar + theta phi2 (-F Fbar) with a single tail evaluation.
    const double tail_t = F.tail(t);
    value = tail_t * (1.0 - model.theta() * model.phi2(y) * (1.0 - tail_t));
  } else {
    value = F.tail(t) + model.theta() * model.phi2(y) * kernel_tail_integral(model, t);
  }
  if (value >= 0.0 && value <= 1.0) return value;
  if (value >= -1e-12 && value <= 1.0 + 1e-12) return std::clamp(value, 0.0, 1.0);
  throw InternalError("conditional tail P[X > " + fmt(t) + " | Y = " + fmt(y) + "] = " + fmt(value) +
                      " lies outside [0, 1]");
}

// ---------------------------------------------------------------------------

TwistedLaw::TwistedLaw(const SarmanovModel& model)
    : base_(model.discount()), theta_d1_(model.theta() * model.d1()) {
  if (model.kernels().is_fgm()) {
    phi2_ = [G = model.discount()](double y) { return 1.0 - 2.0 * G.cdf(y); };
  } else {
    phi2_ = model.kernels().custom_phi2();
  }

  for (double u : spot_check_levels()) {
    const double y = base_.quantile(u);
    const double ratio = density_ratio(y);
    if (!(ratio >= -1e-12)) {
      throw ModelError("twisted density ratio 1 + theta d1 phi2(y) = " + fmt(ratio) + " is negative at y = " + fmt(y));
    }
  }
  const double mass = total_mass();
  if (std::fabs(mass - 1.0) > 1e-8) {
    throw ModelError("twisted law has total mass " + fmt(mass) + " instead of 1 (E[phi2(Y)] != 0)");
  }
}

double TwistedLaw::density_ratio(double y) const { return 1.0 + theta_d1_ * phi2_(y); }

double TwistedLaw::integrate_over_levels(const std::function<double(double)>& h, double from_level) const {
  if (from_level >= 1.0) return 0.0;
  auto integrand = [&](double u) {
    const double y = base_.quantile(u);
    return h(y) * density_ratio(y);
  };
  return quad::integrate(integrand, from_level, 1.0, {1e-13, 1e-12, 10000}).value;
}

double TwistedLaw::total_mass() const {
  return integrate_over_levels([](double) { return 1.0; }, 0.0);
}

double TwistedLaw::tail(double y) const {
  return integrate_over_levels([](double) { return 1.0; }, base_.cdf(y));
}

double TwistedLaw::power_moment(double p) const {
  if (!(p >= 0.0)) throw DomainError("power moment order must be >= 0");
  return integrate_over_levels([p](double y) { return std::pow(y, p); }, 0.0);
}

TwistedLaw twisted_law(const SarmanovModel& model) { return TwistedLaw(model); }

}  // namespace sarmruin
