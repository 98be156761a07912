/* C interface to the sarmruin library.
 *
 * Every function returns an sr_status; on failure sr_last_error() holds a
 * message for the calling thread until its next sr_* call. Handles are
 * opaque and must be released with the matching *_free function.
 */
#ifndef SARMRUIN_H
#define SARMRUIN_H

#include <stddef.h>
#include <stdint.h>

#if defined(SARMRUIN_BUILDING_LIBRARY)
#define SR_API __attribute__((visibility("default")))
#else
#define SR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sr_status {
  SR_OK = 0,
  SR_ERR_ARGUMENT = 1,   /* null pointer or out-of-range argument */
  SR_ERR_CONFIG = 2,     /* malformed experiment file or catalog entry */
  SR_ERR_DOMAIN = 3,     /* argument outside the operation's domain */
  SR_ERR_MODEL = 4,      /* Sarmanov constraint violated */
  SR_ERR_HYPOTHESIS = 5, /* theorem hypothesis violated */
  SR_ERR_NUMERICAL = 6,  /* quadrature or sampler failure */
  SR_ERR_INTERNAL = 7,   /* cross-check between two routes failed */
  SR_ERR_IO = 8
} sr_status;

typedef enum sr_method { SR_METHOD_EXACT = 0, SR_METHOD_CRUDE = 1, SR_METHOD_CONDITIONAL = 2 } sr_method;

typedef struct sr_model sr_model;
typedef struct sr_experiment sr_experiment;

typedef struct sr_constants {
  double alpha;
  double theta;
  double d1;
  double e_y_alpha;
  double kernel_moment;
  double kappa;
  double twisted_alpha_moment;
} sr_constants;

typedef struct sr_settings {
  sr_method method;
  uint64_t n_samples;
  uint64_t seed;
  unsigned workers;
  double tail_tol; /* infinite horizon only */
} sr_settings;

typedef struct sr_estimate {
  double value;
  double std_error;
  uint64_t n_samples;
  sr_method method;
  int has_truncation;      /* nonzero for the infinite horizon */
  unsigned truncation_index;
  double remainder_bound;
} sr_estimate;

SR_API const char* sr_version(void);
SR_API const char* sr_last_error(void);
SR_API const char* sr_status_name(sr_status status);

/* Default settings: conditional, 10^6 samples, seed 0, one worker, tail_tol 0.01. */
SR_API sr_settings sr_default_settings(void);

/* Model built from the [model] table of a TOML document. */
SR_API sr_status sr_model_from_toml(const char* toml_text, sr_model** out);
SR_API void sr_model_free(sr_model* model);
SR_API sr_status sr_model_describe(const sr_model* model, char** out);
/* SR_OK when every constraint holds, SR_ERR_MODEL naming the first violation otherwise. */
SR_API sr_status sr_model_validate(const sr_model* model);

SR_API sr_status sr_model_constants(const sr_model* model, sr_constants* out);
SR_API sr_status sr_finite_horizon_factor(const sr_model* model, unsigned n, double* out);
SR_API sr_status sr_infinite_horizon_factor(const sr_model* model, double* out);
SR_API sr_status sr_exact_product_tail(const sr_model* model, double x, double* out);

SR_API sr_status sr_product_tail_mc(const sr_model* model, double x, const sr_settings* settings, sr_estimate* out);
SR_API sr_status sr_estimate_H_i(const sr_model* model, unsigned i, double x, const sr_settings* settings,
                                 sr_estimate* out);
SR_API sr_status sr_finite_ruin(const sr_model* model, double x, unsigned n, const sr_settings* settings,
                                sr_estimate* out);
SR_API sr_status sr_infinite_ruin(const sr_model* model, double x, const sr_settings* settings, sr_estimate* out);

/* Writes n joint draws into xs[0..n) and ys[0..n). */
SR_API sr_status sr_sample_joint(const sr_model* model, size_t n, uint64_t seed, unsigned workers, double* xs,
                                 double* ys);

SR_API sr_status sr_experiment_load_file(const char* path, sr_experiment** out);
SR_API sr_status sr_experiment_load_string(const char* toml_text, sr_experiment** out);
SR_API void sr_experiment_free(sr_experiment* experiment);
SR_API sr_status sr_experiment_set_seed(sr_experiment* experiment, uint64_t seed);
SR_API sr_status sr_experiment_set_workers(sr_experiment* experiment, unsigned workers);
SR_API sr_status sr_experiment_set_out_dir(sr_experiment* experiment, const char* dir);
/* Checks seed, workers, the task kind and the model constraints without running. */
SR_API sr_status sr_experiment_validate(const sr_experiment* experiment);
/* Runs the task; on success *summary_json receives the summary (free with sr_string_free). */
SR_API sr_status sr_experiment_run(const sr_experiment* experiment, char** summary_json);

SR_API void sr_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* SARMRUIN_H */
