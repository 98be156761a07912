#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sarmruin/sarmanov.hpp"

namespace sarmruin {

enum class Verdict { Pass, PassByCatalog, HeuristicPass, Fail, NotApplicable };

std::string to_string(Verdict verdict);

/// Whether a verdict counts as the condition holding.
constexpr bool holds(Verdict v) noexcept {
  return v == Verdict::Pass || v == Verdict::PassByCatalog || v == Verdict::HeuristicPass;
}

/// A named scalar series over the x-grid.
struct Series {
  std::string name;
  std::vector<double> values;
};

struct Check {
  std::string name;
  Verdict verdict = Verdict::Fail;
  std::string detail;
};

struct ConditionRecord {
  std::string name;
  bool applicable = false;
  Verdict verdict = Verdict::NotApplicable;
  std::vector<Check> checks;
  std::vector<Series> diagnostics;
};

struct DZReport {
  SvForm l_form = SvForm::TypeI;
  std::vector<double> x_grid;
  std::array<ConditionRecord, 4> dz;  ///< DZ1 .. DZ4
  std::vector<Check> hypotheses;
  std::vector<Series> hypothesis_series;

  bool any_dz_holds() const;
};

SvForm classify_sv(const SlowlyVaryingSpec& spec);

/// n points, geometrically spaced from lo to hi inclusive.
std::vector<double> geometric_grid(double lo, double hi, std::size_t n);

/// 200 points on [1, 1e6].
std::vector<double> default_condition_grid();

/// Numerical diagnostics for DZ1..DZ4 and the hypotheses of the product-tail
/// asymptotics. The grid must be increasing, start at >= 1 and span >= 6 decades.
DZReport dz_report(const SarmanovModel& model, std::span<const double> x_grid = {});

// ---------------------------------------------------------------------------

enum class SummabilityVariant { DZ1, DZ2, DZ3, DZ4 };
enum class SummabilityVerdict { Converged, Diverging, Inconclusive, Automatic };

std::string to_string(SummabilityVariant variant);
std::string to_string(SummabilityVerdict verdict);
SummabilityVariant summability_variant_from_string(const std::string& name);

/// Least-squares fit log C_i = a + i log r with a 95% interval on r.
struct GeometricFit {
  double rate = 0.0;
  double rate_lo = 0.0;
  double rate_hi = 0.0;
  std::size_t points = 0;
};

struct SummabilityReport {
  SummabilityVariant variant = SummabilityVariant::DZ2;
  /// Entry k belongs to i = k + 2.
  std::vector<double> c_values;
  std::vector<double> c_stderr;
  std::vector<double> c_lognormal;  ///< same sup with a lognormal law for zeta_i
  std::vector<double> argmax_x;
  std::vector<bool> exact_zero;
  bool alpha_below_one = false;
  double epsilon = 0.5;
  std::vector<double> partial_sums;
  SummabilityVerdict verdict = SummabilityVerdict::Inconclusive;
  std::optional<GeometricFit> fit;
  std::string detail;
};

struct SummabilitySettings {
  unsigned i_max = 12;
  double epsilon = 0.5;
  std::uint64_t mc_n = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// C_i = grid-sup of the variant's ratio for i = 2..i_max, the partial sums
/// and a geometric-decay verdict. P[zeta_i > x] is exactly 0 when the support
/// of G forces it, and a Monte Carlo estimate otherwise.
SummabilityReport summability_report(const SarmanovModel& model, SummabilityVariant variant,
                                     const SummabilitySettings& settings, std::span<const double> x_grid = {});

}  // namespace sarmruin
