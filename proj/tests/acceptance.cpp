// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "sarmruin/asymptotics.hpp"
#include "sarmruin/conditions.hpp"
#include "sarmruin/experiment.hpp"
#include "sarmruin/simulate.hpp"
#include "support.hpp"

using namespace sarmruin;

namespace {

int failures = 0;

void report(const std::string& id, bool ok, const std::string& what) {
  std::printf("%s [%s] %s\n", ok ? "PASS" : "FAIL", id.c_str(), what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& line) {
  std::printf("       %s\n", line.c_str());
  std::fflush(stdout);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool close_abs(double a, double b, double tol) { return std::fabs(a - b) <= tol; }
bool close_rel(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::fabs(b); }

// Oracle constants for config A with general theta: Y ~ U(0,1), phi2 = 1 - 2y,
// d1 = -1, alpha = 2.
struct OracleConstants {
  double e_y_alpha;
  double kappa;
};

OracleConstants oracle_constants(double theta) {
  const double e = testing::oracle_integral([](double y) { return y * y; }, 0.0, 1.0);
  const double kappa = testing::oracle_integral([&](double y) { return y * y * (1.0 - theta * (1.0 - 2.0 * y)); }, 0.0, 1.0);
  return {e, kappa};
}

double oracle_finite(const OracleConstants& c, unsigned n) {
  double sum = 0.0;
  double power = 1.0;
  for (unsigned i = 1; i <= n; ++i) {
    sum += power;
    power *= c.e_y_alpha;
  }
  return c.kappa * sum;
}

// --------------------------------------------------------------------------

void criterion_1() {
  Timer t;
  const auto model = testing::config_a();
  const auto c = breiman_constant(model);
  const double f2 = finite_horizon_factor(c, 2);
  const double f5 = finite_horizon_factor(c, 5);
  const double finf = infinite_horizon_factor(c);
  const double secs = t.seconds();

  const auto o = oracle_constants(1.0);
  const double o_inf = o.kappa / (1.0 - o.e_y_alpha);
  const bool ok = close_abs(c.kappa, o.kappa, 1e-9) && close_abs(c.e_y_alpha, o.e_y_alpha, 1e-9) &&
                  close_abs(f2, oracle_finite(o, 2), 1e-9) && close_abs(f5, oracle_finite(o, 5), 1e-9) &&
                  close_abs(finf, o_inf, 1e-9) && close_abs(c.kappa, 0.5, 1e-9) &&
                  close_abs(c.e_y_alpha, 1.0 / 3.0, 1e-9) && close_abs(f2, 2.0 / 3.0, 1e-9) &&
                  close_abs(f5, 0.5 * (1.0 - std::pow(3.0, -5.0)) / (2.0 / 3.0), 1e-9) && close_abs(finf, 0.75, 1e-9) &&
                  secs < 1.0;
  report("1", ok,
         "constants: kappa=" + num(c.kappa) + " E[Y^a]=" + num(c.e_y_alpha) + " f(2)=" + num(f2) +
             " f(5)=" + num(f5) + " f(inf)=" + num(finf) + " (tol 1e-9, " + num(secs) + " s < 1 s)");
}

// --------------------------------------------------------------------------

// phi(v) = 1 - (k+1) v^k on the CDF scale: mean zero, range [-k, 1].
double power_kernel(double k, double v) { return 1.0 - (k + 1.0) * std::pow(v, k); }

struct RandomCase {
  SarmanovModel model;
  // kappa by a test-side integral over G, given theta * d1.
  std::function<double(double)> kappa_oracle;
  std::string label;
};

RandomCase random_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double alpha = 0.5 + 3.5 * unit(rng);
  const double k1 = 1.0 + std::floor(3.0 * unit(rng));
  const double k2 = 1.0 + std::floor(3.0 * unit(rng));
  const double theta = (2.0 * unit(rng) - 1.0) / (k1 * k2);
  const int family = static_cast<int>(std::floor(3.0 * unit(rng)));

  std::optional<DiscountLaw> g;
  std::function<double(double)> q;  // quantile of G; empty for the beta case
  std::function<double(double)> beta_kappa;
  std::string label;
  if (family == 0) {
    const double b = 0.5 + unit(rng);
    g.emplace(UniformLaw{b});
    q = [b](double v) { return b * v; };
    label = "uniform(" + num(b) + ")";
  } else if (family == 1) {
    const double a = 0.5 + 3.0 * unit(rng);
    const double bb = 0.5 + 3.0 * unit(rng);
    const double s = 0.5 + unit(rng);
    g.emplace(ScaledBetaLaw{a, bb, s});
    // Integrate against the beta density on t = y / scale.
    beta_kappa = [a, bb, s, alpha, k2](double theta_d1) {
      return std::pow(s, alpha) * testing::oracle_integral(
                                      [&](double t) {
                                        if (t <= 0.0 || t >= 1.0) return 0.0;
                                        const double v = boost::math::ibeta(a, bb, t);
                                        return std::pow(t, alpha) * (1.0 + theta_d1 * power_kernel(k2, v)) *
                                               boost::math::ibeta_derivative(a, bb, t);
                                      },
                                      0.0, 1.0);
    };
    label = "scaled_beta(" + num(a) + "," + num(bb) + "," + num(s) + ")";
  } else {
    const double idx = 0.5 + 2.0 * unit(rng);
    const double lo = 0.1 + 0.4 * unit(rng);
    const double hi = lo + 0.5 + unit(rng);
    g.emplace(BoundedParetoLaw{idx, lo, hi});
    q = [idx, lo, hi](double v) {
      const double r = std::pow(lo / hi, idx);
      return lo * std::pow(1.0 - v * (1.0 - r), -1.0 / idx);
    };
    label = "bounded_pareto(" + num(idx) + "," + num(lo) + "," + num(hi) + ")";
  }

  RegularlyVaryingLaw f(alpha, 1.0, SlowlyVaryingSpec::type_i(1.0));
  const DiscountLaw gl = *g;
  auto phi1 = [f, k1](double x) { return power_kernel(k1, f.cdf(x)); };
  auto phi2 = [gl, k2](double y) { return power_kernel(k2, gl.cdf(y)); };
  auto kernels = KernelPair::custom(phi1, phi2, std::max(1.0, k1), std::max(1.0, k2), -k1);
  label += " alpha=" + num(alpha) + " theta=" + num(theta) + " k=" + num(k1) + "," + num(k2);
  std::function<double(double)> kappa_oracle = beta_kappa;
  if (!kappa_oracle) {
    kappa_oracle = [q, alpha, k2](double theta_d1) {
      return testing::oracle_integral(
          [&](double v) { return std::pow(q(v), alpha) * (1.0 + theta_d1 * power_kernel(k2, v)); }, 0.0, 1.0);
    };
  }
  return {SarmanovModel(f, gl, theta, kernels), kappa_oracle, label};
}

void criterion_2() {
  bool ok = true;
  {
    const auto model = testing::config_a();
    const double twisted = twisted_law(model).power_moment(2.0);
    const double kappa = oracle_constants(1.0).kappa;
    const bool pass = close_abs(twisted, kappa, 1e-9) && close_abs(breiman_constant(model).kappa, kappa, 1e-9);
    info("config A: E_twisted[Y^a]=" + num(twisted) + " oracle kappa=" + num(kappa));
    ok = ok && pass;
  }
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 5; ++trial) {
    const auto c = random_case(rng);
    require_valid(c.model);
    const double alpha = c.model.alpha();
    const double theta_d1 = c.model.theta() * c.model.d1();
    const double kappa = c.kappa_oracle(theta_d1);
    const double twisted = twisted_law(c.model).power_moment(alpha);
    const double lib_kappa = breiman_constant(c.model).kappa;
    const bool pass = close_abs(twisted, kappa, 1e-9) && close_abs(lib_kappa, kappa, 1e-9);
    info(c.label + ": twisted=" + num(twisted) + " kappa=" + num(lib_kappa) + " oracle=" + num(kappa) +
         (pass ? "" : "  <-- mismatch"));
    ok = ok && pass;
  }
  report("2", ok, "twisted-law moment equals kappa to 1e-9 for config A and 5 random custom models");
}

// --------------------------------------------------------------------------

EstimatorSettings settings(Method method, std::uint64_t n, std::uint64_t seed) {
  EstimatorSettings s;
  s.method = method;
  s.n_samples = n;
  s.seed = seed;
  s.workers = 1;
  return s;
}

void product_tail_criterion(const std::string& id, double theta, double target) {
  const auto model = testing::config_a(theta);
  Timer t;
  const auto est = product_tail_mc(model, 100.0, settings(Method::Conditional, 1000000, 11));
  const double secs = t.seconds();
  const double exact = exact_product_tail(model, 100.0);
  const double oracle = testing::product_tail_oracle(2.0, 1.0, theta, 100.0);
  const double ratio = est.value / model.loss().tail(100.0);
  const bool ok = std::fabs(est.value - exact) <= 3.0 * est.std_error && close_rel(exact, oracle, 1e-8) &&
                  close_rel(ratio, target, 0.01) && secs < 10.0;
  report(id, ok,
         "product tail theta=" + num(theta) + ": MC=" + num(est.value) + " +- " + num(est.std_error) +
             " exact=" + num(exact) + " oracle=" + num(oracle) + " ratio=" + num(ratio) + " vs " + num(target) +
             " (" + num(secs) + " s < 10 s)");
}

void finite_ruin_criterion(const std::string& id, double theta, double target) {
  const auto model = testing::config_a(theta);
  Timer t;
  const auto cond = estimate_finite_ruin(model, 100.0, 5, settings(Method::Conditional, 1000000, 12));
  const double ratio = cond.value / model.loss().tail(100.0);
  const auto cond20 = estimate_finite_ruin(model, 20.0, 5, settings(Method::Conditional, 1000000, 13));
  const auto crude20 = estimate_finite_ruin(model, 20.0, 5, settings(Method::Crude, 10000000, 14));
  const double secs = t.seconds();
  const bool ok = close_rel(ratio, target, 0.03) && close_rel(crude20.value, cond20.value, 0.10) && secs < 120.0;
  report(id, ok,
         "finite ruin theta=" + num(theta) + " n=5: ratio(100)=" + num(ratio) + " vs " + num(target) +
             "; x=20 crude=" + num(crude20.value) + " +- " + num(crude20.std_error) + " conditional=" +
             num(cond20.value) + " +- " + num(cond20.std_error) + " (" + num(secs) + " s < 120 s)");
}

void infinite_ruin_criterion(const std::string& id, double theta, double target) {
  const auto model = testing::config_a(theta);
  Timer t;
  auto s = settings(Method::Conditional, 1000000, 15);
  s.tail_tol = 0.01;
  const auto est = estimate_infinite_ruin(model, 100.0, s);
  const double secs = t.seconds();
  const double ratio = est.value / model.loss().tail(100.0);
  const double remainder = est.remainder_bound.value_or(INFINITY);
  const bool ok = close_rel(ratio, target, 0.05) && remainder <= 0.01 * est.value && secs < 120.0;
  report(id, ok,
         "infinite ruin theta=" + num(theta) + ": ratio(100)=" + num(ratio) + " vs " + num(target) +
             " N=" + std::to_string(est.truncation_index.value_or(0)) + " remainder bound=" + num(remainder) +
             " (" + num(remainder / est.value) + " of estimate) (" + num(secs) + " s < 120 s)");
}

void criterion_6() {
  const auto o = oracle_constants(0.0);
  const auto c = breiman_constant(testing::config_a(0.0));
  const bool constants_ok = close_abs(c.kappa, 1.0 / 3.0, 1e-9) && close_abs(c.kappa, o.kappa, 1e-9);
  report("6", constants_ok, "theta=0 kappa=" + num(c.kappa) + " (independent product: E[Y^a]=1/3)");
  product_tail_criterion("6/3", 0.0, o.kappa);
  finite_ruin_criterion("6/4", 0.0, oracle_finite(o, 5));
  infinite_ruin_criterion("6/5", 0.0, o.kappa / (1.0 - o.e_y_alpha));
}

// --------------------------------------------------------------------------

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

void criterion_7() {
  bool ok = true;
  std::uint64_t seed = 1;
  for (double theta : {-1.0, 0.5, 1.0}) {
    const auto model = testing::config_a(theta);
    const auto draws = sample_joint(model, 1000000, seed++, 1);
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> p1;
    std::vector<double> p2;
    std::vector<double> cross;
    for (const auto& d : draws) {
      xs.push_back(d.x);
      ys.push_back(d.y);
      const double a = 1.0 - 2.0 * (1.0 - 1.0 / (d.x * d.x));
      const double b = 1.0 - 2.0 * d.y;
      p1.push_back(a);
      p2.push_back(b);
      cross.push_back(a * b);
    }
    const double px = testing::ks_p_value(
        testing::ks_distance(xs, [](double x) { return x <= 1.0 ? 0.0 : 1.0 - 1.0 / (x * x); }), xs.size());
    const double py = testing::ks_p_value(
        testing::ks_distance(ys, [](double y) { return std::clamp(y, 0.0, 1.0); }), ys.size());
    const auto c1 = mean_se(p1);
    const auto c2 = mean_se(p2);
    const auto cm = mean_se(cross);
    const bool pass = px > 0.01 && py > 0.01 && std::fabs(c1.mean) <= 4.0 * c1.se &&
                      std::fabs(c2.mean) <= 4.0 * c2.se && std::fabs(cm.mean - theta / 9.0) <= 4.0 * cm.se;
    info("theta=" + num(theta) + ": KS p(X)=" + num(px) + " p(Y)=" + num(py) + " E[phi1]=" + num(c1.mean) +
         " (se " + num(c1.se) + ") E[phi2]=" + num(c2.mean) + " (se " + num(c2.se) + ") E[phi1 phi2]=" +
         num(cm.mean) + " vs " + num(theta / 9.0) + " (se " + num(cm.se) + ")");
    ok = ok && pass;
  }
  report("7", ok, "sampler: KS marginals, centering and cross-moment theta/9 at 1e6 draws");
}

// --------------------------------------------------------------------------

const Series* find_series(const ConditionRecord& r, const std::string& name) {
  for (const auto& s : r.diagnostics) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void criterion_8() {
  const auto a = dz_report(testing::config_a());
  const auto* sup = find_series(a.dz[0], "sup_ratio");
  const bool sup_one = sup && std::all_of(sup->values.begin(), sup->values.end(), [](double v) { return v == 1.0; });
  const bool a_ok = a.dz[0].verdict == Verdict::Pass && sup_one && a.dz[3].verdict == Verdict::Pass;
  report("8a", a_ok,
         "config A: DZ1 " + to_string(a.dz[0].verdict) + " (sup-ratio identically 1: " + (sup_one ? "yes" : "no") +
             "), DZ4 " + to_string(a.dz[3].verdict));

  const auto model = testing::type_iii_model(DiscountLaw(LognormalLaw{0.0, 1.0}));
  const auto grid = default_condition_grid();
  const auto r = dz_report(model, grid);
  const auto* ratio = find_series(r.dz[2], "o_ratio");
  bool decreasing = ratio != nullptr;
  std::size_t start = 0;
  while (start < grid.size() && grid[start] < grid.back() / 1000.0) ++start;
  if (decreasing) {
    for (std::size_t k = start + 1; k < grid.size(); ++k) decreasing = decreasing && ratio->values[k] < ratio->values[k - 1];
  }
  report("8b", decreasing && r.dz[2].applicable,
         "TypeIII with Lognormal(0,1) G: DZ3 " + to_string(r.dz[2].verdict) +
             ", o-ratio strictly decreasing over [1e3, 1e6]: " + (decreasing ? "yes" : "no") +
             (ratio ? " (" + num(ratio->values[start]) + " -> " + num(ratio->values.back()) + ")" : ""));
}

// --------------------------------------------------------------------------

// Exact C_i for Y ~ U(0,2), alpha = 2, DZ2 weight x^2: -sum log U_j ~ Gamma(i-1).
double oracle_c_uniform2(unsigned i, const std::vector<double>& grid) {
  const double steps = static_cast<double>(i - 1);
  double best = 0.0;
  for (double x : grid) {
    const double z = steps * std::log(2.0) - std::log(x);
    const double p = z > 0.0 ? boost::math::gamma_p(steps, z) : 0.0;
    best = std::max(best, p * x * x);
  }
  return best;
}

void criterion_9() {
  SummabilitySettings s;
  s.i_max = 12;
  const auto a = summability_report(testing::config_a(), SummabilityVariant::DZ2, s);
  const bool zeros = std::all_of(a.c_values.begin(), a.c_values.end(), [](double c) { return c == 0.0; }) &&
                     std::all_of(a.exact_zero.begin(), a.exact_zero.end(), [](bool z) { return z; });
  report("9a", zeros && a.verdict == SummabilityVerdict::Converged,
         "config A DZ2: C_i = 0 for i in [2,12]: " + std::string(zeros ? "yes" : "no") + ", verdict " +
             to_string(a.verdict));

  s.mc_n = 1000000;
  s.seed = 9;
  const auto grid = default_condition_grid();
  const auto b = summability_report(testing::uniform2_model(), SummabilityVariant::DZ2, s, grid);
  bool oracle_ok = true;
  for (std::size_t k = 0; k < b.c_values.size(); ++k) {
    const unsigned i = static_cast<unsigned>(k + 2);
    const double exact = oracle_c_uniform2(i, grid);
    const bool agree = std::fabs(b.c_values[k] - exact) <= 4.0 * b.c_stderr[k] + 1e-12;
    oracle_ok = oracle_ok && agree;
    info("i=" + std::to_string(i) + " C_i=" + num(b.c_values[k]) + " +- " + num(b.c_stderr[k]) +
         " oracle=" + num(exact) + (agree ? "" : "  <-- outside 4 se"));
  }
  const bool fit_ok = b.fit && b.fit->rate_hi < 1.0;
  const std::string fit = b.fit ? "r=" + num(b.fit->rate) + " 95% CI [" + num(b.fit->rate_lo) + ", " +
                                      num(b.fit->rate_hi) + "]"
                                : "no fit";
  report("9b", fit_ok && oracle_ok,
         "Uniform(0,2) DZ2: " + fit + ", verdict " + to_string(b.verdict) + ", MC matches oracle: " +
             (oracle_ok ? "yes" : "no") + " (requires r < 1 at 95%)");
}

// --------------------------------------------------------------------------

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = "x,estimate,stderr,tail_F,ratio,predicted,rel_err\n";
  for (const auto& r : rows) {
    out += format_number(r.x) + "," + format_number(r.estimate) + "," + format_number(r.std_error) + "," +
           format_number(r.tail_F) + "," + format_number(r.ratio) + "," + format_number(r.predicted) + "," +
           format_number(r.rel_err) + "\n";
  }
  return out;
}

void criterion_10() {
  const auto model = testing::config_a();
  const std::vector<double> grid{10.0, 30.0, 100.0};
  struct Case {
    std::string name;
    Horizon horizon;
    Method method;
  };
  const std::vector<Case> cases{
      {"product/conditional", Horizon::product(), Method::Conditional},
      {"product/crude", Horizon::product(), Method::Crude},
      {"finite(5)/conditional", Horizon::finite(5), Method::Conditional},
      {"finite(5)/crude", Horizon::finite(5), Method::Crude},
      {"infinite/conditional", Horizon::infinite(), Method::Conditional},
  };
  bool ok = true;
  for (const auto& c : cases) {
    EstimatorSettings s;
    s.method = c.method;
    s.n_samples = 100000;
    s.seed = 42;
    s.workers = 4;
    const auto first = curve_csv(ratio_curve(model, grid, c.horizon, s));
    const auto second = curve_csv(ratio_curve(model, grid, c.horizon, s));
    const bool same = first == second;
    info(c.name + ": " + (same ? "identical" : "DIFFERENT") + " (" + std::to_string(first.size()) + " bytes)");
    ok = ok && same;
  }
  report("10", ok, "seed=42 workers=4: two runs give byte-identical CSV for every estimator");
}

template <class Fn>
void guarded(const std::string& id, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    report(id, false, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded("1", criterion_1);
  guarded("2", criterion_2);
  guarded("3", [] { product_tail_criterion("3", 1.0, 0.5); });
  guarded("4", [] { finite_ruin_criterion("4", 1.0, 0.5 * (1.0 - std::pow(3.0, -5.0)) / (2.0 / 3.0)); });
  guarded("5", [] { infinite_ruin_criterion("5", 1.0, 0.75); });
  guarded("6", criterion_6);
  guarded("7", criterion_7);
  guarded("8", criterion_8);
  guarded("9", criterion_9);
  guarded("10", criterion_10);
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
