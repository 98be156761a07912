#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarmruin/sarmanov.hpp"

namespace sarmruin {

/// A declarative experiment: one [model] table, one [task] table, explicit
/// seed and workers, and an output directory.
///
/// The parsed file is held as JSON; it is echoed verbatim into summary.json.
class Experiment {
 public:
  static Experiment from_file(const std::filesystem::path& path);
  static Experiment from_string(const std::string& toml_text);

  void override_seed(std::uint64_t seed);
  void override_workers(unsigned workers);
  void override_out_dir(const std::string& dir);

  const nlohmann::json& spec() const noexcept { return spec_; }
  std::string task_kind() const;
  std::uint64_t seed() const;
  unsigned workers() const;
  std::filesystem::path out_dir() const;

  /// Builds the model from the catalog; throws ConfigError on unknown or
  /// malformed entries. Does not validate the Sarmanov constraints.
  SarmanovModel build_model() const;

  struct Outcome {
    std::vector<std::filesystem::path> files;
    nlohmann::json summary;
  };

  /// Validates the model, runs the task and writes <out>/summary.json plus
  /// <out>/curve.csv (curve tasks) or <out>/samples.csv (sample task).
  Outcome run() const;

 private:
  explicit Experiment(nlohmann::json spec);

  nlohmann::json spec_;
};

/// Builds a model from the [model] table of a TOML document.
SarmanovModel model_from_toml(const std::string& toml_text);

/// Shortest decimal representation that round-trips.
std::string format_number(double v);

std::string version_string();

}  // namespace sarmruin
