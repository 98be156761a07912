#include "sarmruin/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <toml.hpp>

#include "sarmruin/asymptotics.hpp"
#include "sarmruin/conditions.hpp"
#include "sarmruin/errors.hpp"
#include "sarmruin/simulate.hpp"

namespace sarmruin {

using nlohmann::json;

namespace {

const char* const kTaskKinds[] = {"constants", "product-tail", "ruin-finite", "ruin-infinite",
                                  "dz-check",  "summability",  "sample"};

json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (auto&& [key, value] : *t) out[std::string(key.str())] = toml_to_json(value);
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (auto&& value : *a) out.push_back(toml_to_json(value));
    return out;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw ConfigError("date and time values are not supported in experiment files");
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError("missing key '" + where + key + "'");
  return obj.at(key);
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw ConfigError("'" + where + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::uint64_t count(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError("'" + where + key + "' must be a nonnegative integer");
}

std::uint64_t count_or(const json& obj, const std::string& key, std::uint64_t fallback, const std::string& where) {
  return obj.contains(key) ? count(obj, key, where) : fallback;
}

std::string text(const json& obj, const std::string& key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw ConfigError("'" + where + key + "' must be a string");
  return v.get<std::string>();
}

std::string text_or(const json& obj, const std::string& key, const std::string& fallback, const std::string& where) {
  return obj.contains(key) ? text(obj, key, where) : fallback;
}

LongTailedLaw long_tailed_law(const json& obj, const std::string& where) {
  const std::string family = text(obj, "family", where);
  if (family == "pareto") return LongTailedLaw(ParetoTail{number(obj, "index", where), number_or(obj, "scale", 1.0, where)});
  if (family == "weibull") return LongTailedLaw(WeibullTail{number(obj, "shape", where), number_or(obj, "rate", 1.0, where)});
  if (family == "lognormal") return LongTailedLaw(LognormalTail{number(obj, "mu", where), number(obj, "sigma", where)});
  throw ConfigError("unknown long-tailed family '" + family + "' at " + where + " (expected pareto, weibull, lognormal)");
}

RegularlyVaryingLaw loss_law(const json& obj) {
  const std::string where = "model.F.";
  const double alpha = number(obj, "alpha", where);
  const double x_m = number_or(obj, "x_m", 1.0, where);
  const std::string form = text_or(obj, "form", "i", where);
  const double c = number_or(obj, "c", 1.0, where);
  auto law = [&](const char* key) { return long_tailed_law(require(obj, key, where), where + key + "."); };
  if (form == "i") return RegularlyVaryingLaw(alpha, x_m, SlowlyVaryingSpec::type_i(c));
  if (form == "ii") return RegularlyVaryingLaw(alpha, x_m, SlowlyVaryingSpec::type_ii(c, law("V")));
  if (form == "iii") return RegularlyVaryingLaw(alpha, x_m, SlowlyVaryingSpec::type_iii(c, law("U")));
  if (form == "iv") return RegularlyVaryingLaw(alpha, x_m, SlowlyVaryingSpec::type_iv(c, law("U"), law("V")));
  throw ConfigError("unknown slowly varying form '" + form + "' (expected i, ii, iii, iv)");
}

DiscountLaw discount_law(const json& obj) {
  const std::string where = "model.G.";
  const std::string family = text(obj, "family", where);
  if (family == "uniform") return DiscountLaw(UniformLaw{number_or(obj, "b", 1.0, where)});
  if (family == "scaled_beta")
    return DiscountLaw(ScaledBetaLaw{number(obj, "a", where), number(obj, "b", where), number_or(obj, "scale", 1.0, where)});
  if (family == "bounded_pareto")
    return DiscountLaw(BoundedParetoLaw{number(obj, "index", where), number(obj, "lo", where), number(obj, "hi", where)});
  if (family == "lognormal") return DiscountLaw(LognormalLaw{number(obj, "mu", where), number(obj, "sigma", where)});
  if (family == "point_mass") return DiscountLaw(PointMassLaw{number(obj, "y0", where)});
  throw ConfigError("unknown discount family '" + family +
                    "' (expected uniform, scaled_beta, bounded_pareto, lognormal, point_mass)");
}

// phi(t) built from a small catalog of forms; `cdf` is the matching marginal CDF.
KernelFn kernel_function(const json& obj, const std::string& where, std::function<double(double)> cdf) {
  const std::string form = text(obj, "form", where);
  const double a = number_or(obj, "a", 1.0, where);
  const double b = number_or(obj, "b", 0.0, where);
  if (form == "affine") return [a, b](double t) { return a * t + b; };
  if (form == "exp") {
    const double rate = number(obj, "rate", where);
    return [a, b, rate](double t) { return a * std::exp(-rate * t) + b; };
  }
  if (form == "cdf_affine") return [a, b, cdf = std::move(cdf)](double t) { return a * cdf(t) + b; };
  throw ConfigError("unknown kernel form '" + form + "' at " + where + " (expected affine, exp, cdf_affine)");
}

std::vector<double> x_grid(const json& task, bool required) {
  if (!task.contains("x_grid")) {
    if (required) throw ConfigError("missing key 'task.x_grid'");
    return {};
  }
  const json& g = task.at("x_grid");
  std::vector<double> grid;
  if (g.is_array()) {
    for (const auto& v : g) {
      if (!v.is_number()) throw ConfigError("'task.x_grid' entries must be numbers");
      grid.push_back(v.get<double>());
    }
  } else if (g.is_object()) {
    const double lo = number(g, "from", "task.x_grid.");
    const double hi = number(g, "to", "task.x_grid.");
    const auto n = count(g, "points", "task.x_grid.");
    try {
      grid = geometric_grid(lo, hi, n);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("task.x_grid: ") + e.what());
    }
  } else {
    throw ConfigError("'task.x_grid' must be an array or a {from, to, points} table");
  }
  if (grid.empty()) throw ConfigError("'task.x_grid' is empty");
  return grid;
}

json series_json(const std::vector<Series>& series) {
  json out = json::object();
  for (const auto& s : series) out[s.name] = s.values;
  return out;
}

json checks_json(const std::vector<Check>& checks) {
  json out = json::array();
  for (const auto& c : checks) out.push_back({{"name", c.name}, {"verdict", to_string(c.verdict)}, {"detail", c.detail}});
  return out;
}

json dz_json(const DZReport& r) {
  json out;
  out["l_form"] = to_string(r.l_form);
  out["x_grid"] = r.x_grid;
  out["conditions"] = json::array();
  for (const auto& c : r.dz) {
    out["conditions"].push_back({{"name", c.name},
                                 {"applicable", c.applicable},
                                 {"verdict", to_string(c.verdict)},
                                 {"checks", checks_json(c.checks)},
                                 {"diagnostics", series_json(c.diagnostics)}});
  }
  out["hypotheses"] = checks_json(r.hypotheses);
  out["hypothesis_series"] = series_json(r.hypothesis_series);
  return out;
}

json summability_json(const SummabilityReport& r) {
  json out;
  out["variant"] = to_string(r.variant);
  out["c_values"] = r.c_values;
  out["c_stderr"] = r.c_stderr;
  out["c_lognormal_approx"] = r.c_lognormal;
  out["argmax_x"] = r.argmax_x;
  out["exact_zero"] = r.exact_zero;
  out["alpha_branch"] = r.alpha_below_one ? "alpha<1" : "alpha>=1";
  out["epsilon"] = r.epsilon;
  out["partial_sums"] = r.partial_sums;
  out["verdict"] = to_string(r.verdict);
  out["detail"] = r.detail;
  if (r.fit) {
    out["fit"] = {{"rate", r.fit->rate}, {"rate_lo", r.fit->rate_lo}, {"rate_hi", r.fit->rate_hi}, {"points", r.fit->points}};
  } else {
    out["fit"] = nullptr;
  }
  return out;
}

json constants_json(const AsymptoticConstants& c) {
  return {{"alpha", c.alpha},         {"theta", c.theta},
          {"d1", c.d1},               {"e_y_alpha", c.e_y_alpha},
          {"kernel_moment", c.kernel_moment}, {"kappa", c.kappa},
          {"twisted_alpha_moment", c.twisted_alpha_moment}};
}

void write_text(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  out << contents;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = "x,estimate,stderr,tail_F,ratio,predicted,rel_err\n";
  for (const auto& r : rows) {
    for (double v : {r.x, r.estimate, r.std_error, r.tail_F, r.ratio, r.predicted}) {
      out += format_number(v);
      out += ',';
    }
    out += format_number(r.rel_err);
    out += '\n';
  }
  return out;
}

json rows_json(const std::vector<CurveRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    json row = {{"x", r.x},           {"estimate", r.estimate}, {"stderr", r.std_error},
                {"tail_F", r.tail_F}, {"ratio", r.ratio},       {"predicted", r.predicted},
                {"rel_err", r.rel_err}};
    if (r.truncation_index) row["truncation_index"] = *r.truncation_index;
    if (r.remainder_bound) row["remainder_bound"] = *r.remainder_bound;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string version_string() { return SARMRUIN_VERSION; }

Experiment::Experiment(json spec) : spec_(std::move(spec)) {
  if (!spec_.contains("model") || !spec_.at("model").is_object()) throw ConfigError("missing [model] table");
  if (!spec_.contains("task") || !spec_.at("task").is_object()) throw ConfigError("missing [task] table");
  const std::string kind = task_kind();
  bool known = false;
  for (const char* k : kTaskKinds) known |= kind == k;
  if (!known) {
    throw ConfigError("unknown task kind '" + kind +
                      "' (expected constants, product-tail, ruin-finite, ruin-infinite, dz-check, summability, sample)");
  }
}

Experiment Experiment::from_string(const std::string& toml_text) {
  try {
    const toml::table table = toml::parse(toml_text);
    return Experiment(toml_to_json(table));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error: " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(os.str());
  }
}

Experiment Experiment::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read experiment file '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return from_string(os.str());
}

void Experiment::override_seed(std::uint64_t seed) { spec_["seed"] = seed; }
void Experiment::override_workers(unsigned workers) { spec_["workers"] = workers; }
void Experiment::override_out_dir(const std::string& dir) { spec_["output"]["dir"] = dir; }

std::string Experiment::task_kind() const { return text(spec_.at("task"), "kind", "task."); }

std::uint64_t Experiment::seed() const { return count(spec_, "seed", ""); }

unsigned Experiment::workers() const {
  const auto w = count(spec_, "workers", "");
  if (w < 1 || w > 4096) throw ConfigError("'workers' must be between 1 and 4096");
  return static_cast<unsigned>(w);
}

std::filesystem::path Experiment::out_dir() const {
  if (spec_.contains("output")) return text_or(spec_.at("output"), "dir", "out", "output.");
  return "out";
}

static SarmanovModel model_from_json(const json& m) {
  if (!m.is_object()) throw ConfigError("missing [model] table");
  try {
    auto F = loss_law(require(m, "F", "model."));
    auto G = discount_law(require(m, "G", "model."));
    const double theta = number(m, "theta", "model.");
    KernelPair kernels = KernelPair::fgm();
    if (m.contains("kernel")) {
      const json& k = m.at("kernel");
      const std::string type = k.is_string() ? k.get<std::string>() : text(k, "type", "model.kernel.");
      if (type == "custom") {
        if (!k.is_object()) throw ConfigError("custom kernels need a [model.kernel] table");
        auto phi1 = kernel_function(require(k, "phi1", "model.kernel."), "model.kernel.phi1.",
                                    [F](double x) { return F.cdf(x); });
        auto phi2 = kernel_function(require(k, "phi2", "model.kernel."), "model.kernel.phi2.",
                                    [G](double y) { return G.cdf(y); });
        kernels = KernelPair::custom(std::move(phi1), std::move(phi2), number(k, "b1", "model.kernel."),
                                     number(k, "b2", "model.kernel."), number(k, "d1", "model.kernel."));
      } else if (type != "fgm") {
        throw ConfigError("unknown kernel type '" + type + "' (expected fgm or custom)");
      }
    }
    return SarmanovModel(std::move(F), std::move(G), theta, std::move(kernels));
  } catch (const DomainError& e) {
    throw ModelError(std::string("invalid model parameters: ") + e.what());
  }
}

SarmanovModel model_from_toml(const std::string& toml_text) {
  try {
    const toml::table table = toml::parse(toml_text);
    const json doc = toml_to_json(table);
    if (!doc.contains("model")) throw ConfigError("missing [model] table");
    return model_from_json(doc.at("model"));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error: " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(os.str());
  }
}

SarmanovModel Experiment::build_model() const { return model_from_json(spec_.at("model")); }

Experiment::Outcome Experiment::run() const {
  const auto started = std::chrono::steady_clock::now();
  const std::uint64_t seed_value = seed();
  const unsigned worker_count = workers();
  const std::string kind = task_kind();
  const json& task = spec_.at("task");
  const std::string where = "task.";

  const SarmanovModel model = build_model();
  const ValidationReport validation = validate(model);
  if (!validation.valid()) throw ModelError("invalid Sarmanov model: " + validation.first_failure());

  const auto dir = out_dir();
  std::filesystem::create_directories(dir);
  Outcome outcome;
  json result;
  result["model"] = model.describe();
  result["warnings"] = validation.warnings;

  auto settings = [&] {
    EstimatorSettings s;
    s.method = method_from_string(text_or(task, "method", "conditional", where));
    s.n_samples = count_or(task, "n_samples", 1000000, where);
    s.seed = seed_value;
    s.workers = worker_count;
    s.tail_tol = number_or(task, "tail_tol", 0.01, where);
    return s;
  };
  auto write_curve = [&](const std::vector<CurveRow>& rows) {
    const auto path = dir / "curve.csv";
    write_text(path, curve_csv(rows));
    outcome.files.push_back(path);
    result["rows"] = rows_json(rows);
  };

  if (kind == "constants") {
    const auto c = breiman_constant(model);
    result["constants"] = constants_json(c);
    json finite = json::array();
    std::vector<unsigned> horizons = {1, 2, 5, 10};
    if (task.contains("horizons")) {
      horizons.clear();
      for (const auto& h : task.at("horizons")) {
        if (!h.is_number_integer() || h.get<std::int64_t>() < 1) throw ConfigError("'task.horizons' must be positive integers");
        horizons.push_back(h.get<unsigned>());
      }
    }
    for (unsigned n : horizons) finite.push_back({{"n", n}, {"factor", finite_horizon_factor(c, n)}});
    result["kappa"] = c.kappa;
    result["e_y_alpha"] = c.e_y_alpha;
    result["finite_factors"] = finite;
    try {
      result["infinite_factor"] = infinite_horizon_factor(c);
    } catch (const HypothesisError& e) {
      result["infinite_factor"] = nullptr;
      result["infinite_factor_error"] = e.what();
    }
  } else if (kind == "product-tail") {
    write_curve(ratio_curve(model, x_grid(task, true), Horizon::product(), settings()));
  } else if (kind == "ruin-finite") {
    const auto n = count(task, "n", where);
    if (n < 1 || n > 1000000) throw ConfigError("'task.n' must be between 1 and 10^6");
    auto s = settings();
    if (s.method == Method::Exact) throw ConfigError("ruin-finite supports methods crude and conditional");
    write_curve(ratio_curve(model, x_grid(task, true), Horizon::finite(static_cast<unsigned>(n)), s));
  } else if (kind == "ruin-infinite") {
    auto s = settings();
    if (s.method == Method::Exact) throw ConfigError("ruin-infinite supports methods crude and conditional");
    write_curve(ratio_curve(model, x_grid(task, true), Horizon::infinite(), s));
  } else if (kind == "dz-check") {
    result["dz_report"] = dz_json(dz_report(model, x_grid(task, false)));
  } else if (kind == "summability") {
    SummabilitySettings s;
    s.i_max = static_cast<unsigned>(count_or(task, "i_max", 12, where));
    s.epsilon = number_or(task, "epsilon", 0.5, where);
    s.mc_n = count_or(task, "mc_n", 100000, where);
    s.seed = seed_value;
    s.workers = worker_count;
    const auto variant = summability_variant_from_string(text_or(task, "variant", "DZ2", where));
    result["summability"] = summability_json(summability_report(model, variant, s, x_grid(task, false)));
  } else if (kind == "sample") {
    const auto n = count(task, "n_samples", where);
    const auto draws = sample_joint(model, n, seed_value, worker_count);
    std::string csv = "x,y\n";
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& d : draws) {
      csv += format_number(d.x) + "," + format_number(d.y) + "\n";
      sx += d.x;
      sy += d.y;
    }
    const auto path = dir / "samples.csv";
    write_text(path, csv);
    outcome.files.push_back(path);
    result["n_samples"] = n;
    result["mean_x"] = n ? sx / static_cast<double>(n) : 0.0;
    result["mean_y"] = n ? sy / static_cast<double>(n) : 0.0;
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json summary;
  summary["spec"] = spec_;
  summary["task"] = kind;
  summary["seed"] = seed_value;
  summary["workers"] = worker_count;
  summary["version"] = version_string();
  summary["wall_time_seconds"] = wall;
  summary["result"] = std::move(result);
  const auto path = dir / "summary.json";
  write_text(path, summary.dump(2) + "\n");
  outcome.files.push_back(path);
  outcome.summary = std::move(summary);
  return outcome;
}

}  // namespace sarmruin
