// Command-line runner for experiment files. Talks to the library only
// through the C interface.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sarmruin.h"

namespace {

// 2 = invalid model, 3 = hypothesis violated, 4 = numerical failure,
// 1 = anything else (configuration, I/O, arguments).
int exit_code(sr_status status) {
  switch (status) {
    case SR_OK: return 0;
    case SR_ERR_MODEL: return 2;
    case SR_ERR_HYPOTHESIS: return 3;
    case SR_ERR_NUMERICAL:
    case SR_ERR_INTERNAL: return 4;
    default: return 1;
  }
}

int fail(sr_status status) {
  std::fprintf(stderr, "error (%s): %s\n", sr_status_name(status), sr_last_error());
  return exit_code(status);
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
};

sr_status load(const std::string& path, const Overrides& o, sr_experiment** out) {
  sr_status s = sr_experiment_load_file(path.c_str(), out);
  if (s != SR_OK) return s;
  if (o.seed && (s = sr_experiment_set_seed(*out, *o.seed)) != SR_OK) return s;
  if (o.workers && (s = sr_experiment_set_workers(*out, *o.workers)) != SR_OK) return s;
  if (o.out_dir && (s = sr_experiment_set_out_dir(*out, o.out_dir->c_str())) != SR_OK) return s;
  return SR_OK;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail asymptotics and ruin probabilities under Sarmanov dependence"};
  app.require_subcommand(1);

  std::string spec_path;
  Overrides overrides;

  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("spec", spec_path, "Experiment file (TOML)")->required();
    sub->add_option("--seed", overrides.seed, "Override the seed in the experiment file");
    sub->add_option("--workers", overrides.workers, "Override the worker count")->check(CLI::PositiveNumber);
    sub->add_option("--out-dir", overrides.out_dir, "Override the output directory");
  };

  auto* run = app.add_subcommand("run", "Run the experiment and write its outputs");
  add_overrides(run);
  auto* check = app.add_subcommand("validate", "Parse the experiment file and validate the model");
  add_overrides(check);
  app.add_subcommand("version", "Print the library version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (app.got_subcommand("version")) {
    std::printf("sarmruin %s\n", sr_version());
    return 0;
  }

  sr_experiment* experiment = nullptr;
  sr_status status = load(spec_path, overrides, &experiment);
  if (status != SR_OK) {
    sr_experiment_free(experiment);
    return fail(status);
  }

  if (app.got_subcommand("validate")) {
    status = sr_experiment_validate(experiment);
    sr_experiment_free(experiment);
    if (status != SR_OK) return fail(status);
    std::printf("%s: valid\n", spec_path.c_str());
    return 0;
  }

  char* summary = nullptr;
  status = sr_experiment_run(experiment, &summary);
  sr_experiment_free(experiment);
  if (status != SR_OK) return fail(status);
  std::printf("%s\n", summary);
  sr_string_free(summary);
  return 0;
}
