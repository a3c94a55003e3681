#pragma once

// Flat "key = value" run configuration. '#' starts a comment line. Unknown
// or repeated keys are errors. The effective configuration is written back
// in the same syntax with every key present.

#include <cstdint>
#include <string>
#include <vector>

#include "foldgan/loadsim.hpp"
#include "foldgan/tstr.hpp"
#include "foldgan/wgan.hpp"

namespace foldgan::io {

/// Environment variable that replaces the built-in default of `seed`.
inline constexpr const char* kSeedEnv = "FOLDGAN_SEED";

struct RunConfig {
  SimConfig sim;
  std::size_t latent_dim = 128;
  wgan::GanTrainConfig gan;
  wgan::FitMode fit = wgan::FitMode::crop;
  tstr::ClassifierConfig classifier;
  std::size_t trials = 8;
  std::size_t generated_per_class = 5000;
  double train_ratio = 0.5;
  std::size_t threads = 1;
  std::uint64_t seed = 1;

  /// Trial settings with `seed` as the experiment seed.
  tstr::TstrConfig tstr_config() const;
  void validate() const;
};

/// Built-in defaults, with `seed` taken from FOLDGAN_SEED when set.
RunConfig default_run_config();

/// Applies the keys in `text` on top of `base`. Throws ConfigError naming
/// the line for unknown keys, duplicates, or bad values.
RunConfig parse_run_config(const std::string& text, RunConfig base = default_run_config());
RunConfig load_run_config(const std::string& path);

std::string format_run_config(const RunConfig& cfg);
void save_run_config(const RunConfig& cfg, const std::string& path);

/// All accepted keys in output order.
std::vector<std::string> run_config_keys();

}  // namespace foldgan::io
