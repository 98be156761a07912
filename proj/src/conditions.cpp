#include "sarmruin/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "normal.hpp"
#include "overloaded.hpp"
#include "sarmruin/errors.hpp"
#include "sarmruin/parallel.hpp"
#include "sarmruin/quadrature.hpp"
#include "sarmruin/rng.hpp"
#include "sarmruin/simulate.hpp"

namespace sarmruin {

namespace {

constexpr double kDecadesRequired = 6.0;
constexpr double kTopDecades = 3.0;
constexpr double kORatioDrop = 0.01;
constexpr double kConvolutionTol = 0.15;
constexpr double kSupGrowthTol = 0.05;
constexpr double kDominatedSpreadTol = 1.5;
constexpr double kMaxRelStderr = 0.25;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Verdict combine(std::span<const Check> checks) {
  bool heuristic = false;
  bool catalog = false;
  for (const auto& c : checks) {
    if (!holds(c.verdict)) return Verdict::Fail;
    heuristic |= c.verdict == Verdict::HeuristicPass;
    catalog |= c.verdict == Verdict::PassByCatalog;
  }
  if (heuristic) return Verdict::HeuristicPass;
  if (catalog) return Verdict::PassByCatalog;
  return Verdict::Pass;
}

// First grid index inside the top `decades` decades.
std::size_t top_start(std::span<const double> grid, double decades) {
  const double cut = grid.back() * std::pow(10.0, -decades);
  return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), cut) - grid.begin());
}

// o(.) rule: identically zero over the top decades passes; otherwise the
// ratio must decrease strictly there and end below 1% of where it started.
Check o_ratio_check(const std::string& name, std::span<const double> grid, std::span<const double> ratio) {
  const std::size_t k0 = top_start(grid, kTopDecades);
  const auto top = ratio.subspan(k0);
  if (std::all_of(top.begin(), top.end(), [](double r) { return r == 0.0; })) {
    return {name, Verdict::Pass, "ratio identically 0 over the top three decades"};
  }
  for (double r : top) {
    if (!std::isfinite(r)) return {name, Verdict::Fail, "ratio not finite on the grid"};
  }
  for (std::size_t k = 1; k < top.size(); ++k) {
    if (!(top[k] < top[k - 1])) {
      return {name, Verdict::Fail, "ratio not strictly decreasing at x = " + fmt(grid[k0 + k])};
    }
  }
  if (!(top.back() < kORatioDrop * top.front())) {
    return {name, Verdict::Fail, "ratio fell only from " + fmt(top.front()) + " to " + fmt(top.back())};
  }
  return {name, Verdict::Pass,
          "strictly decreasing over the top three decades, " + fmt(top.front()) + " -> " + fmt(top.back())};
}

// Grid-sup rule for a bounded-ratio condition: exact 1 everywhere passes,
// otherwise the sup over the last decade may exceed the sup over the decade
// before it by at most 5%.
Check sup_ratio_check(const std::string& name, std::span<const double> grid, std::span<const double> ratio) {
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  if (*lo == 1.0 && *hi == 1.0) return {name, Verdict::Pass, "sup-ratio exactly 1 at every grid point"};
  for (double r : ratio) {
    if (!std::isfinite(r)) return {name, Verdict::Fail, "sup-ratio not finite on the grid"};
  }
  const std::size_t last = top_start(grid, 1.0);
  const std::size_t prev = top_start(grid, 2.0);
  const double sup_last = *std::max_element(ratio.begin() + static_cast<std::ptrdiff_t>(last), ratio.end());
  const double sup_prev = *std::max_element(ratio.begin() + static_cast<std::ptrdiff_t>(prev),
                                            ratio.begin() + static_cast<std::ptrdiff_t>(last));
  const auto argmax = std::max_element(ratio.begin(), ratio.end()) - ratio.begin();
  const std::string where = "grid-sup " + fmt(*hi) + " at x = " + fmt(grid[static_cast<std::size_t>(argmax)]);
  if (sup_last <= (1.0 + kSupGrowthTol) * sup_prev) return {name, Verdict::HeuristicPass, where + ", stabilized"};
  return {name, Verdict::Fail, where + ", still growing (" + fmt(sup_prev) + " -> " + fmt(sup_last) + ")"};
}

bool catalog_subexponential_star(const LongTailedLaw& law, std::string& why) {
  return std::visit(detail::Overloaded{
                        [&](const ParetoTail& p) {
                          why = p.index > 1.0 ? "Pareto with index > 1" : "Pareto with index <= 1 has infinite mean";
                          return p.index > 1.0;
                        },
                        [&](const WeibullTail& w) {
                          why = w.shape < 1.0 ? "Weibull with shape < 1" : "Weibull with shape >= 1 is light-tailed";
                          return w.shape < 1.0;
                        },
                        [&](const LognormalTail&) {
                          why = "lognormal";
                          return true;
                        },
                    },
                    law.family());
}

// f(t) = L(e^t) / L(x_m) on t >= 0; checks (f*f)(t) / f(t) against 2 int f at
// three large t.
Check convolution_check(const RegularlyVaryingLaw& F, std::span<const double> grid) {
  const double t0 = std::max(0.0, std::log(F.x_m()));
  const double log_l0 = F.sv().raw_log_value(t0);
  auto f = [&](double s) { return std::exp(F.sv().raw_log_value(t0 + s) - log_l0); };
  double mass;
  try {
    // s = w^2 tames stretched-exponential decay.
    mass = quad::integrate_to_infinity([&](double w) { return 2.0 * w * f(w * w); }, 0.0).value;
  } catch (const NumericalError&) {
    return {"L(e^x) in S_d", Verdict::Fail, "L(e^x) is not integrable"};
  }
  if (!std::isfinite(mass)) return {"L(e^x) in S_d", Verdict::Fail, "L(e^x) is not integrable"};

  std::string detail = "convolution ratio / (2 int f):";
  bool ok = true;
  for (double decades : {2.0, 1.0, 0.0}) {
    const double t = std::log(grid.back() * std::pow(10.0, -decades)) - t0;
    const double conv = quad::integrate([&](double s) { return f(s) * f(t - s); }, 0.0, t).value;
    const double rel = conv / f(t) / (2.0 * mass);
    detail += " " + fmt(rel);
    ok &= std::fabs(rel - 1.0) <= kConvolutionTol;
  }
  return {"L(e^x) in S_d", ok ? Verdict::HeuristicPass : Verdict::Fail, detail};
}

// Whether E[X^alpha] = inf, i.e. m(x) -> inf.
bool alpha_moment_infinite(const RegularlyVaryingLaw& F, std::string& why) {
  const auto& sv = F.sv();
  switch (sv.form()) {
    case SvForm::TypeI:
    case SvForm::TypeII:
      why = "L bounded below, int L(e^t) dt diverges";
      return true;
    case SvForm::TypeIII:
      why = "E[U] = " + fmt(sv.u_law()->mean());
      return !std::isfinite(sv.u_law()->mean());
    case SvForm::TypeIV: {
      if (!std::isfinite(sv.u_law()->mean())) {
        why = "E[U] = inf";
        return true;
      }
      try {
        const double t0 = std::max(0.0, std::log(F.x_m()));
        const double v = quad::integrate_to_infinity([&](double s) { return F.slowly_varying(std::exp(t0 + s)); }, 0.0)
                             .value;
        why = "int L(e^t) dt = " + fmt(v);
        return !std::isfinite(v);
      } catch (const NumericalError&) {
        why = "int L(e^t) dt did not converge";
        return true;
      }
    }
  }
  return false;
}

std::vector<double> checked_grid(std::span<const double> x_grid) {
  std::vector<double> grid(x_grid.begin(), x_grid.end());
  if (grid.empty()) grid = default_condition_grid();
  if (grid.size() < 3) throw DomainError("condition grid needs at least 3 points");
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1])) throw DomainError("condition grid must be strictly increasing");
  if (!(grid.front() >= 1.0)) throw DomainError("condition grid must start at x >= 1");
  if (!(std::log10(grid.back() / grid.front()) >= kDecadesRequired - 1e-9))
    throw DomainError("condition grid must span at least 6 decades");
  return grid;
}

}  // namespace

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass: return "pass";
    case Verdict::PassByCatalog: return "pass-by-catalog";
    case Verdict::HeuristicPass: return "heuristic-pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

bool DZReport::any_dz_holds() const {
  return std::any_of(dz.begin(), dz.end(), [](const ConditionRecord& r) { return holds(r.verdict); });
}

SvForm classify_sv(const SlowlyVaryingSpec& spec) { return spec.form(); }

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw DomainError("geometric grid needs 0 < lo < hi and n >= 2");
  std::vector<double> grid(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) grid[k] = lo * std::exp(step * static_cast<double>(k));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> default_condition_grid() { return geometric_grid(1.0, 1e6, 200); }

DZReport dz_report(const SarmanovModel& model, std::span<const double> x_grid) {
  require_valid(model);
  DZReport report;
  report.x_grid = checked_grid(x_grid);
  const auto& grid = report.x_grid;
  const auto& F = model.loss();
  const auto& G = model.discount();
  const double alpha = F.alpha();
  const std::size_t n = grid.size();
  report.l_form = classify_sv(F.sv());
  const bool log_type = report.l_form == SvForm::TypeIII || report.l_form == SvForm::TypeIV;

  std::vector<double> L(n);
  for (std::size_t k = 0; k < n; ++k) L[k] = F.slowly_varying(grid[k]);

  // DZ1: sup_{1 <= y <= x} L(y) / L(x).
  {
    auto& r = report.dz[0];
    r.name = "DZ1";
    r.applicable = true;
    Series sup{"sup_ratio", std::vector<double>(n)};
    double running = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      running = std::max(running, L[k]);
      sup.values[k] = report.l_form == SvForm::TypeI ? 1.0 : running / L[k];
    }
    r.checks.push_back(sup_ratio_check("sup_{y in [1,x]} L(y)/L(x) < inf", grid, sup.values));
    r.diagnostics.push_back(std::move(sup));
    r.verdict = combine(r.checks);
  }

  // DZ2: L(e^x) in S_d.
  {
    auto& r = report.dz[1];
    r.name = "DZ2";
    r.applicable = log_type;
    if (log_type) {
      if (report.l_form == SvForm::TypeIII) {
        std::string why;
        const bool member = catalog_subexponential_star(*F.sv().u_law(), why);
        r.checks.push_back({"L(e^x) in S_d", member ? Verdict::PassByCatalog : Verdict::Fail, why});
      } else {
        r.checks.push_back(convolution_check(F, grid));
      }
      r.verdict = combine(r.checks);
    }
  }

  // DZ3: U in S* and P[Y > x] = o(x^-alpha P[U > log x]).
  {
    auto& r = report.dz[2];
    r.name = "DZ3";
    r.applicable = log_type;
    if (log_type) {
      const auto& U = *F.sv().u_law();
      std::string why;
      const bool member = catalog_subexponential_star(U, why);
      r.checks.push_back({"U in S*", member ? Verdict::PassByCatalog : Verdict::Fail, why});
      Series ratio{"o_ratio", std::vector<double>(n)};
      for (std::size_t k = 0; k < n; ++k) {
        const double g = G.tail(grid[k]);
        ratio.values[k] = g == 0.0 ? 0.0 : std::exp(std::log(g) + alpha * std::log(grid[k]) - U.log_tail(std::log(grid[k])));
      }
      r.checks.push_back(o_ratio_check("P[Y>x] = o(x^-alpha P[U > log x])", grid, ratio.values));
      r.diagnostics.push_back(std::move(ratio));
      r.verdict = combine(r.checks);
    }
  }

  // DZ4: E[X^alpha] = inf, P[Y > x] = o(Fbar(x) / m(x)), and
  // limsup sup_{sqrt x <= y <= x} L(y) / L(x) < inf.
  {
    auto& r = report.dz[3];
    r.name = "DZ4";
    r.applicable = true;
    std::string why;
    const bool premise = alpha_moment_infinite(F, why);
    r.checks.push_back({"E[X^alpha] = inf", premise ? Verdict::Pass : Verdict::Fail, why});

    Series m{"m", std::vector<double>(n)};
    Series ratio{"o_ratio", std::vector<double>(n)};
    Series sqrt_sup{"sqrt_sup_ratio", std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) {
      const double x = grid[k];
      m.values[k] = x >= F.x_m() ? F.truncated_alpha_moment(x) : 0.0;
      const double g = G.tail(x);
      ratio.values[k] = g == 0.0 ? 0.0 : g * m.values[k] / F.tail(x);
      double sup = 1.0;
      if (report.l_form != SvForm::TypeI) {
        const auto first = std::lower_bound(grid.begin(), grid.end(), std::sqrt(x)) - grid.begin();
        for (auto j = static_cast<std::size_t>(first); j <= k; ++j) sup = std::max(sup, L[j] / L[k]);
      }
      sqrt_sup.values[k] = sup;
    }
    const bool m_monotone = std::is_sorted(m.values.begin(), m.values.end());
    r.checks.push_back({"m(x) nondecreasing", m_monotone ? Verdict::Pass : Verdict::Fail,
                        "m(x_max) = " + fmt(m.values.back())});
    r.checks.push_back(o_ratio_check("P[Y>x] = o(P[X>x]/m(x))", grid, ratio.values));
    r.checks.push_back(sup_ratio_check("sup_{sqrt x <= y <= x} L(y)/L(x) < inf", grid, sqrt_sup.values));
    r.diagnostics.push_back(std::move(m));
    r.diagnostics.push_back(std::move(ratio));
    r.diagnostics.push_back(std::move(sqrt_sup));
    r.verdict = combine(r.checks);
  }

  // Hypotheses of the product-tail asymptotics.
  {
    const double e_y_alpha = G.power_moment(alpha);
    report.hypotheses.push_back({"E[Y^alpha] < inf", std::isfinite(e_y_alpha) ? Verdict::Pass : Verdict::Fail,
                                 "E[Y^alpha] = " + fmt(e_y_alpha)});

    Series g_over_f{"G_over_F", std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) g_over_f.values[k] = G.tail(grid[k]) / F.tail(grid[k]);
    report.hypotheses.push_back(o_ratio_check("Gbar(x) = o(Fbar(x))", grid, g_over_f.values));

    // H* is the law of X* Y* with independent copies, i.e. theta = 0.
    const auto independent = model.with_theta(0.0);
    Series h_star{"H_star_tail", std::vector<double>(n)};
    Series doubling{"H_star_doubling_ratio", std::vector<double>(n, std::numeric_limits<double>::quiet_NaN())};
    Series g_over_h{"G_over_H_star", std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) {
      h_star.values[k] = grid[k] >= F.x_m() ? exact_product_tail(independent, grid[k]) : 1.0;
      g_over_h.values[k] = G.tail(grid[k]) / h_star.values[k];
      if (grid[k] / 2.0 >= F.x_m()) doubling.values[k] = exact_product_tail(independent, grid[k] / 2.0) / h_star.values[k];
    }
    const std::size_t k0 = top_start(grid, kTopDecades);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t k = k0; k < n; ++k) {
      lo = std::min(lo, doubling.values[k]);
      hi = std::max(hi, doubling.values[k]);
    }
    const bool dominated = std::isfinite(hi) && lo > 0.0 && hi <= kDominatedSpreadTol * lo;
    report.hypotheses.push_back({"H* in D", dominated ? Verdict::HeuristicPass : Verdict::Fail,
                                 "H*(x/2)/H*(x) in [" + fmt(lo) + ", " + fmt(hi) + "] over the top three decades"});
    report.hypotheses.push_back(o_ratio_check("Gbar(x) = o(Hbar*(x))", grid, g_over_h.values));
    report.hypothesis_series.push_back(std::move(g_over_f));
    report.hypothesis_series.push_back(std::move(h_star));
    report.hypothesis_series.push_back(std::move(doubling));
    report.hypothesis_series.push_back(std::move(g_over_h));
  }
  return report;
}

// ---------------------------------------------------------------------------

std::string to_string(SummabilityVariant variant) {
  switch (variant) {
    case SummabilityVariant::DZ1: return "DZ1";
    case SummabilityVariant::DZ2: return "DZ2";
    case SummabilityVariant::DZ3: return "DZ3";
    case SummabilityVariant::DZ4: return "DZ4";
  }
  return "?";
}

std::string to_string(SummabilityVerdict verdict) {
  switch (verdict) {
    case SummabilityVerdict::Converged: return "converged";
    case SummabilityVerdict::Diverging: return "diverging";
    case SummabilityVerdict::Inconclusive: return "inconclusive";
    case SummabilityVerdict::Automatic: return "automatic";
  }
  return "?";
}

SummabilityVariant summability_variant_from_string(const std::string& name) {
  if (name == "DZ1" || name == "dz1") return SummabilityVariant::DZ1;
  if (name == "DZ2" || name == "dz2") return SummabilityVariant::DZ2;
  if (name == "DZ3" || name == "dz3") return SummabilityVariant::DZ3;
  if (name == "DZ4" || name == "dz4") return SummabilityVariant::DZ4;
  throw DomainError("unknown summability variant '" + name + "' (expected DZ1..DZ4)");
}

SummabilityReport summability_report(const SarmanovModel& model, SummabilityVariant variant,
                                     const SummabilitySettings& settings, std::span<const double> x_grid) {
  if (settings.i_max < 2) throw DomainError("i_max must be >= 2");
  if (!(settings.epsilon > 0.0)) throw DomainError("epsilon must be positive");
  require_valid(model);

  const auto& F = model.loss();
  const auto& G = model.discount();
  const double alpha = F.alpha();
  SummabilityReport report;
  report.variant = variant;
  report.alpha_below_one = alpha < 1.0;
  report.epsilon = settings.epsilon;
  const std::size_t count = settings.i_max - 1;
  const double power = report.alpha_below_one ? 1.0 : 1.0 / (alpha + settings.epsilon);

  auto finish_sums = [&] {
    double acc = 0.0;
    for (double c : report.c_values) {
      acc += std::pow(c, power);
      report.partial_sums.push_back(acc);
    }
  };

  if (variant == SummabilityVariant::DZ1) {
    // No C_i here: the bound runs through E[zeta_i^alpha] = E[Y^alpha]^{i-1}.
    const double e = G.power_moment(alpha);
    for (std::size_t k = 0; k < count; ++k) {
      report.c_values.push_back(std::pow(e, static_cast<double>(k + 1)));
      report.c_stderr.push_back(0.0);
      report.c_lognormal.push_back(report.c_values.back());
      report.argmax_x.push_back(std::numeric_limits<double>::quiet_NaN());
      report.exact_zero.push_back(false);
    }
    finish_sums();
    report.verdict = e < 1.0 ? SummabilityVerdict::Automatic : SummabilityVerdict::Diverging;
    report.detail = "E[zeta_i^alpha] = E[Y^alpha]^{i-1} with E[Y^alpha] = " + fmt(e);
    return report;
  }

  const auto grid = checked_grid(x_grid);
  const std::size_t n = grid.size();

  // Weight w(x) so that the variant's ratio is P[zeta_i > x] * w(x).
  std::vector<double> weight(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double x = grid[k];
    switch (variant) {
      case SummabilityVariant::DZ2:
        weight[k] = 1.0 / F.tail(x);
        break;
      case SummabilityVariant::DZ3: {
        const auto& U = F.sv().u_law();
        if (!U) throw DomainError("variant DZ3 needs L of type iii or iv");
        weight[k] = std::exp(alpha * std::log(x) - U->log_tail(std::log(x)));
        break;
      }
      case SummabilityVariant::DZ4:
        weight[k] = (x >= F.x_m() ? F.truncated_alpha_moment(x) : 0.0) / F.tail(x);
        break;
      case SummabilityVariant::DZ1:
        break;
    }
  }

  const auto logs = G.log_moments();
  const double upper = G.upper_endpoint();
  report.c_values.assign(count, 0.0);
  report.c_stderr.assign(count, 0.0);
  report.c_lognormal.assign(count, 0.0);
  report.argmax_x.assign(count, grid.front());
  report.exact_zero.assign(count, false);
  std::vector<bool> unobserved(count, false);

  parallel_for(count, settings.workers, [&](std::size_t k) {
    const unsigned i = static_cast<unsigned>(k + 2);
    const double steps = static_cast<double>(i - 1);

    // Lognormal approximation of zeta_i, reported next to the estimate.
    double c_ln = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double sd = std::sqrt(steps * logs.variance);
      const double z = std::log(grid[j]) - steps * logs.mean;
      const double p = sd > 0.0 ? detail::normal_tail(z / sd) : (z < 0.0 ? 1.0 : 0.0);
      c_ln = std::max(c_ln, p * weight[j]);
    }
    report.c_lognormal[k] = c_ln;

    if (std::pow(upper, steps) <= grid.front()) {
      report.exact_zero[k] = true;
      return;
    }

    Stream stream(settings.seed, i);
    std::vector<double> log_zeta(settings.mc_n);
    for (auto& lz : log_zeta) {
      double s = 0.0;
      for (unsigned j = 1; j < i; ++j) s += std::log(G.quantile(stream.uniform()));
      lz = s;
    }
    std::sort(log_zeta.begin(), log_zeta.end());
    const double total = static_cast<double>(settings.mc_n);
    double best = 0.0;
    double best_p = 0.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto above = log_zeta.end() - std::upper_bound(log_zeta.begin(), log_zeta.end(), std::log(grid[j]));
      const double p = static_cast<double>(above) / total;
      if (p * weight[j] > best) {
        best = p * weight[j];
        best_p = p;
        best_j = j;
      }
    }
    report.c_values[k] = best;
    report.argmax_x[k] = grid[best_j];
    report.c_stderr[k] = std::sqrt(best_p * (1.0 - best_p) / total) * weight[best_j];
    unobserved[k] = best == 0.0;
  });

  finish_sums();

  const bool all_exact_zero = std::all_of(report.exact_zero.begin(), report.exact_zero.end(), [](bool z) { return z; });
  if (all_exact_zero) {
    report.verdict = SummabilityVerdict::Converged;
    report.detail = "P[zeta_i > x] = 0 on the grid for every i: the support of G ends at " + fmt(upper);
    return report;
  }
  for (std::size_t k = 0; k < count; ++k) {
    if (unobserved[k]) {
      report.verdict = SummabilityVerdict::Inconclusive;
      report.detail = "no Monte Carlo exceedances for i = " + std::to_string(k + 2);
      return report;
    }
    if (!report.exact_zero[k] && report.c_stderr[k] > kMaxRelStderr * report.c_values[k]) {
      report.verdict = SummabilityVerdict::Inconclusive;
      report.detail = "C_" + std::to_string(k + 2) + " has relative stderr " +
                      fmt(report.c_stderr[k] / report.c_values[k]) + " > 0.25";
      return report;
    }
  }

  // Geometric fit on the strictly positive C_i.
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = 0; k < count; ++k) {
    if (report.c_values[k] > 0.0) {
      xs.push_back(static_cast<double>(k + 2));
      ys.push_back(std::log(report.c_values[k]));
    }
  }
  if (xs.size() < 3) {
    report.verdict = SummabilityVerdict::Inconclusive;
    report.detail = "fewer than 3 positive C_i to fit";
    return report;
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    mx += xs[j] / m;
    my += ys[j] / m;
  }
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    sxx += (xs[j] - mx) * (xs[j] - mx);
    sxy += (xs[j] - mx) * (ys[j] - my);
  }
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double e = ys[j] - my - slope * (xs[j] - mx);
    sse += e * e;
  }
  const double se = std::sqrt(sse / (m - 2.0) / sxx);
  const double tq = boost::math::quantile(boost::math::students_t(m - 2.0), 0.975);
  GeometricFit fit;
  fit.rate = std::exp(slope);
  fit.rate_lo = std::exp(slope - tq * se);
  fit.rate_hi = std::exp(slope + tq * se);
  fit.points = xs.size();
  report.fit = fit;
  if (fit.rate_hi < 1.0) {
    report.verdict = SummabilityVerdict::Converged;
  } else if (fit.rate_lo > 1.0) {
    report.verdict = SummabilityVerdict::Diverging;
  } else {
    report.verdict = SummabilityVerdict::Inconclusive;
  }
  report.detail = "fitted r = " + fmt(fit.rate) + ", 95% interval [" + fmt(fit.rate_lo) + ", " + fmt(fit.rate_hi) + "]";
  return report;
}

}  // namespace sarmruin
