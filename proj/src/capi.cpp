#include "sarmruin.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <optional>
#include <string>

#include "sarmruin/asymptotics.hpp"
#include "sarmruin/errors.hpp"
#include "sarmruin/experiment.hpp"
#include "sarmruin/simulate.hpp"

struct sr_model {
  sarmruin::SarmanovModel model;
};

struct sr_experiment {
  sarmruin::Experiment experiment;
};

namespace {

thread_local std::string last_error;

template <class Body>
sr_status guarded(Body&& body) {
  last_error.clear();
  try {
    body();
    return SR_OK;
  } catch (const sarmruin::ConfigError& e) {
    last_error = e.what();
    return SR_ERR_CONFIG;
  } catch (const sarmruin::DomainError& e) {
    last_error = e.what();
    return SR_ERR_DOMAIN;
  } catch (const sarmruin::ModelError& e) {
    last_error = e.what();
    return SR_ERR_MODEL;
  } catch (const sarmruin::HypothesisError& e) {
    last_error = e.what();
    return SR_ERR_HYPOTHESIS;
  } catch (const sarmruin::NumericalError& e) {
    last_error = e.what();
    return SR_ERR_NUMERICAL;
  } catch (const sarmruin::InternalError& e) {
    last_error = e.what();
    return SR_ERR_INTERNAL;
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return SR_ERR_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SR_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return SR_ERR_INTERNAL;
  }
}

sr_status bad_argument(const char* what) {
  last_error = what;
  return SR_ERR_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sarmruin::EstimatorSettings to_settings(const sr_settings& s) {
  sarmruin::EstimatorSettings out;
  switch (s.method) {
    case SR_METHOD_EXACT: out.method = sarmruin::Method::Exact; break;
    case SR_METHOD_CRUDE: out.method = sarmruin::Method::Crude; break;
    case SR_METHOD_CONDITIONAL: out.method = sarmruin::Method::Conditional; break;
    default: throw sarmruin::DomainError("unknown estimator method");
  }
  out.n_samples = s.n_samples;
  out.seed = s.seed;
  out.workers = s.workers;
  out.tail_tol = s.tail_tol;
  return out;
}

sr_estimate to_estimate(const sarmruin::MCEstimate& e) {
  sr_estimate out{};
  out.value = e.value;
  out.std_error = e.std_error;
  out.n_samples = e.n_samples;
  out.method = e.method == sarmruin::Method::Crude ? SR_METHOD_CRUDE : SR_METHOD_CONDITIONAL;
  out.has_truncation = e.truncation_index.has_value() ? 1 : 0;
  out.truncation_index = e.truncation_index.value_or(0);
  out.remainder_bound = e.remainder_bound.value_or(std::nan(""));
  return out;
}

}  // namespace

extern "C" {

const char* sr_version(void) { return SARMRUIN_VERSION; }

const char* sr_last_error(void) { return last_error.c_str(); }

const char* sr_status_name(sr_status status) {
  switch (status) {
    case SR_OK: return "ok";
    case SR_ERR_ARGUMENT: return "argument error";
    case SR_ERR_CONFIG: return "configuration error";
    case SR_ERR_DOMAIN: return "domain error";
    case SR_ERR_MODEL: return "invalid model";
    case SR_ERR_HYPOTHESIS: return "hypothesis violated";
    case SR_ERR_NUMERICAL: return "numerical failure";
    case SR_ERR_INTERNAL: return "internal error";
    case SR_ERR_IO: return "i/o error";
  }
  return "unknown status";
}

sr_settings sr_default_settings(void) {
  return sr_settings{SR_METHOD_CONDITIONAL, 1000000, 0, 1, 0.01};
}

sr_status sr_model_from_toml(const char* toml_text, sr_model** out) {
  if (!toml_text || !out) return bad_argument("null argument");
  *out = nullptr;
  return guarded([&] { *out = new sr_model{sarmruin::model_from_toml(toml_text)}; });
}

void sr_model_free(sr_model* model) { delete model; }

sr_status sr_model_describe(const sr_model* model, char** out) {
  if (!model || !out) return bad_argument("null argument");
  return guarded([&] { *out = copy_string(model->model.describe()); });
}

sr_status sr_model_validate(const sr_model* model) {
  if (!model) return bad_argument("null model");
  return guarded([&] { sarmruin::require_valid(model->model); });
}

sr_status sr_model_constants(const sr_model* model, sr_constants* out) {
  if (!model || !out) return bad_argument("null argument");
  return guarded([&] {
    const auto c = sarmruin::breiman_constant(model->model);
    *out = sr_constants{c.alpha, c.theta, c.d1, c.e_y_alpha, c.kernel_moment, c.kappa, c.twisted_alpha_moment};
  });
}

sr_status sr_finite_horizon_factor(const sr_model* model, unsigned n, double* out) {
  if (!model || !out) return bad_argument("null argument");
  return guarded([&] { *out = sarmruin::finite_horizon_factor(model->model, n); });
}

sr_status sr_infinite_horizon_factor(const sr_model* model, double* out) {
  if (!model || !out) return bad_argument("null argument");
  return guarded([&] { *out = sarmruin::infinite_horizon_factor(model->model); });
}

sr_status sr_exact_product_tail(const sr_model* model, double x, double* out) {
  if (!model || !out) return bad_argument("null argument");
  return guarded([&] { *out = sarmruin::exact_product_tail(model->model, x); });
}

sr_status sr_product_tail_mc(const sr_model* model, double x, const sr_settings* settings, sr_estimate* out) {
  if (!model || !settings || !out) return bad_argument("null argument");
  return guarded([&] { *out = to_estimate(sarmruin::product_tail_mc(model->model, x, to_settings(*settings))); });
}

sr_status sr_estimate_H_i(const sr_model* model, unsigned i, double x, const sr_settings* settings, sr_estimate* out) {
  if (!model || !settings || !out) return bad_argument("null argument");
  return guarded([&] { *out = to_estimate(sarmruin::estimate_H_i(model->model, i, x, to_settings(*settings))); });
}

sr_status sr_finite_ruin(const sr_model* model, double x, unsigned n, const sr_settings* settings, sr_estimate* out) {
  if (!model || !settings || !out) return bad_argument("null argument");
  return guarded(
      [&] { *out = to_estimate(sarmruin::estimate_finite_ruin(model->model, x, n, to_settings(*settings))); });
}

sr_status sr_infinite_ruin(const sr_model* model, double x, const sr_settings* settings, sr_estimate* out) {
  if (!model || !settings || !out) return bad_argument("null argument");
  return guarded([&] { *out = to_estimate(sarmruin::estimate_infinite_ruin(model->model, x, to_settings(*settings))); });
}

sr_status sr_sample_joint(const sr_model* model, size_t n, uint64_t seed, unsigned workers, double* xs, double* ys) {
  if (!model || (n > 0 && (!xs || !ys))) return bad_argument("null argument");
  return guarded([&] {
    const auto draws = sarmruin::sample_joint(model->model, n, seed, workers);
    for (size_t k = 0; k < n; ++k) {
      xs[k] = draws[k].x;
      ys[k] = draws[k].y;
    }
  });
}

sr_status sr_experiment_load_file(const char* path, sr_experiment** out) {
  if (!path || !out) return bad_argument("null argument");
  *out = nullptr;
  return guarded([&] { *out = new sr_experiment{sarmruin::Experiment::from_file(path)}; });
}

sr_status sr_experiment_load_string(const char* toml_text, sr_experiment** out) {
  if (!toml_text || !out) return bad_argument("null argument");
  *out = nullptr;
  return guarded([&] { *out = new sr_experiment{sarmruin::Experiment::from_string(toml_text)}; });
}

void sr_experiment_free(sr_experiment* experiment) { delete experiment; }

sr_status sr_experiment_set_seed(sr_experiment* experiment, uint64_t seed) {
  if (!experiment) return bad_argument("null experiment");
  return guarded([&] { experiment->experiment.override_seed(seed); });
}

sr_status sr_experiment_set_workers(sr_experiment* experiment, unsigned workers) {
  if (!experiment) return bad_argument("null experiment");
  if (workers < 1) return bad_argument("workers must be >= 1");
  return guarded([&] { experiment->experiment.override_workers(workers); });
}

sr_status sr_experiment_set_out_dir(sr_experiment* experiment, const char* dir) {
  if (!experiment || !dir) return bad_argument("null argument");
  return guarded([&] { experiment->experiment.override_out_dir(dir); });
}

sr_status sr_experiment_validate(const sr_experiment* experiment) {
  if (!experiment) return bad_argument("null experiment");
  return guarded([&] {
    const auto& e = experiment->experiment;
    (void)e.seed();
    (void)e.workers();
    sarmruin::require_valid(e.build_model());
  });
}

sr_status sr_experiment_run(const sr_experiment* experiment, char** summary_json) {
  if (!experiment) return bad_argument("null experiment");
  return guarded([&] {
    const auto outcome = experiment->experiment.run();
    if (summary_json) *summary_json = copy_string(outcome.summary.dump(2));
  });
}

void sr_string_free(char* s) { std::free(s); }

}  // extern "C"
