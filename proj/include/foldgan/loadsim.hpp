#pragma once

// Seeded synthetic household load data. Each household is a daily base
// profile with morning/evening bumps, scaled by a per-household lognormal
// factor and perturbed by Gaussian noise. Pool households additionally get
// a pump block: a fixed daily window switched on for a random subset of the
// days in a season window in the first half of the year.

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "foldgan/folding.hpp"

namespace foldgan {

struct SimConfig {
  std::size_t P = 24;
  std::size_t D = 64;
  std::size_t n_households = 200;
  double pool_fraction = 0.1;
  double base_mean = 0.5;
  double noise_sigma = 0.1;
  std::pair<double, double> peak_hours{7.0, 19.0};  // intra-day row indices
  double peak_width = 1.5;                          // bump standard deviation in rows
  double scale_sigma = 0.3;                         // sigma of the log household scale
  double pump_amplitude = 1.0;
  std::pair<std::size_t, std::size_t> pump_rows{9, 16};  // [r0, r1)
  std::pair<std::size_t, std::size_t> pump_cols{6, 28};  // [c0, c1)
  double pump_duty = 0.8;
  /// Probability that a pool-labelled household shows no pump at all.
  double label_noise = 0.0;
  std::uint64_t seed = 42;

  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

struct LabelledDataset {
  std::vector<Heatmap> items;
  std::vector<int> labels;
  std::uint64_t seed = 0;

  std::size_t size() const { return items.size(); }
  std::size_t count(int label) const;
  /// Throws DataError unless labels match items and all shapes agree.
  void validate() const;
};

/// Unnormalized household plus the draws that produced it.
struct RawHousehold {
  Heatmap heatmap;
  double scale = 1.0;
  std::vector<bool> pump_days;  // per column; empty for non-pool
};

RawHousehold simulate_household_raw(const SimConfig& cfg, int label, std::uint64_t seed);

/// Normalized heatmap of one simulated household.
Heatmap simulate_household(const SimConfig& cfg, int label, std::uint64_t seed);

/// n_households heatmaps, exactly round(pool_fraction * n) of them pool.
/// Household i is simulated from derive_seed(cfg.seed, i).
LabelledDataset simulate_dataset(const SimConfig& cfg);

/// Stratified shuffle split. Each class sends round(ratio * count) items to
/// train, clamped so both sides keep at least one item of every class.
std::pair<LabelledDataset, LabelledDataset> split_dataset(const LabelledDataset& ds, double train_ratio,
                                                          std::uint64_t seed);

/// Items carrying `label`, in dataset order.
LabelledDataset class_slice(const LabelledDataset& ds, int label);

LabelledDataset concat(const LabelledDataset& a, const LabelledDataset& b);

}  // namespace foldgan
