#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "sarmruin.h"

namespace {

const char* const kModelA = R"(
[model]
theta = 1.0
[model.F]
alpha = 2.0
[model.G]
family = "uniform"
)";

struct ModelHandle {
  sr_model* m = nullptr;
  explicit ModelHandle(const char* text) { REQUIRE(sr_model_from_toml(text, &m) == SR_OK); }
  ~ModelHandle() { sr_model_free(m); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(sr_version()) > 0);
  CHECK(std::string(sr_status_name(SR_ERR_MODEL)) == "invalid model");
}

TEST_CASE("constants through the C interface") {
  ModelHandle h(kModelA);
  CHECK(sr_model_validate(h.m) == SR_OK);
  sr_constants c;
  REQUIRE(sr_model_constants(h.m, &c) == SR_OK);
  CHECK(c.kappa == doctest::Approx(0.5));
  CHECK(c.e_y_alpha == doctest::Approx(1.0 / 3.0));
  double f = 0.0;
  REQUIRE(sr_finite_horizon_factor(h.m, 5, &f) == SR_OK);
  CHECK(f == doctest::Approx(0.7469135802));
  REQUIRE(sr_infinite_horizon_factor(h.m, &f) == SR_OK);
  CHECK(f == doctest::Approx(0.75));
  REQUIRE(sr_exact_product_tail(h.m, 10.0, &f) == SR_OK);
  CHECK(f == doctest::Approx(4.986666666667e-3));
  char* text = nullptr;
  REQUIRE(sr_model_describe(h.m, &text) == SR_OK);
  CHECK(std::string(text).find("Uniform") != std::string::npos);
  sr_string_free(text);
}

TEST_CASE("estimators through the C interface") {
  ModelHandle h(kModelA);
  sr_settings s = sr_default_settings();
  s.n_samples = 20000;
  s.seed = 5;
  sr_estimate e;
  REQUIRE(sr_product_tail_mc(h.m, 100.0, &s, &e) == SR_OK);
  CHECK(e.value == doctest::Approx(5e-5).epsilon(0.02));
  CHECK(e.has_truncation == 0);
  REQUIRE(sr_infinite_ruin(h.m, 100.0, &s, &e) == SR_OK);
  CHECK(e.has_truncation == 1);
  CHECK(e.remainder_bound > 0.0);
  sr_estimate h1;
  REQUIRE(sr_estimate_H_i(h.m, 1, 100.0, &s, &h1) == SR_OK);
  sr_estimate p;
  REQUIRE(sr_product_tail_mc(h.m, 100.0, &s, &p) == SR_OK);
  CHECK(h1.value == p.value);
  s.method = SR_METHOD_CRUDE;
  REQUIRE(sr_finite_ruin(h.m, 0.0, 2, &s, &e) == SR_OK);
  CHECK(e.value == 1.0);
  std::vector<double> xs(100);
  std::vector<double> ys(100);
  REQUIRE(sr_sample_joint(h.m, 100, 1, 2, xs.data(), ys.data()) == SR_OK);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(xs[i] >= 1.0);
    CHECK((ys[i] > 0.0 && ys[i] < 1.0));
  }
}

TEST_CASE("errors map to status codes with messages") {
  sr_model* m = nullptr;
  CHECK(sr_model_from_toml("[model", &m) == SR_ERR_CONFIG);
  CHECK(m == nullptr);
  CHECK(std::strlen(sr_last_error()) > 0);
  CHECK(sr_model_from_toml(nullptr, &m) == SR_ERR_ARGUMENT);

  ModelHandle bad("[model]\ntheta = 1.2\n[model.F]\nalpha = 2.0\n[model.G]\nfamily = \"uniform\"\n");
  CHECK(sr_model_validate(bad.m) == SR_ERR_MODEL);
  CHECK(std::string(sr_last_error()).find("1+theta*phi1(x)*phi2(y) >= 0") != std::string::npos);

  ModelHandle wide("[model]\ntheta = 1.0\n[model.F]\nalpha = 2.0\n[model.G]\nfamily = \"uniform\"\nb = 2.0\n");
  double f = 0.0;
  CHECK(sr_infinite_horizon_factor(wide.m, &f) == SR_ERR_HYPOTHESIS);
  ModelHandle a(kModelA);
  CHECK(sr_exact_product_tail(a.m, 0.5, &f) == SR_ERR_DOMAIN);
}

TEST_CASE("experiments through the C interface") {
  const std::string text = std::string("seed = 1\nworkers = 1\n") + kModelA + "[task]\nkind = \"constants\"\n";
  sr_experiment* e = nullptr;
  REQUIRE(sr_experiment_load_string(text.c_str(), &e) == SR_OK);
  CHECK(sr_experiment_validate(e) == SR_OK);
  CHECK(sr_experiment_set_workers(e, 0) == SR_ERR_ARGUMENT);
  const auto dir = (std::filesystem::temp_directory_path() / "sarmruin_capi_out").string();
  REQUIRE(sr_experiment_set_out_dir(e, dir.c_str()) == SR_OK);
  char* summary = nullptr;
  REQUIRE(sr_experiment_run(e, &summary) == SR_OK);
  CHECK(std::string(summary).find("\"kappa\": 0.5") != std::string::npos);
  sr_string_free(summary);
  sr_experiment_free(e);
  CHECK(sr_experiment_load_file("/nonexistent/spec.toml", &e) == SR_ERR_CONFIG);
}
