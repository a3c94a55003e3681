#pragma once

// Folding of periodic 1D sequences into 2D heatmaps: every period becomes
// one column, so rows index the position inside a period (time of day) and
// columns index the period (day).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "foldgan/errors.hpp"

namespace foldgan {

inline constexpr int kNonPool = 0;
inline constexpr int kPool = 1;

/// A labelled energy-consumption sequence sampled every `sample_minutes`.
struct LoadSeries {
  std::vector<double> values;
  int sample_minutes = 15;
  int label = kNonPool;
  std::string id;

  /// Throws DataError unless values are non-empty, finite and >= 0 and
  /// sample_minutes divides a day.
  void validate() const;
  /// Readings per day, 1440 / sample_minutes.
  std::size_t samples_per_day() const;
};

/// P x D grid; entry (r, c) is intra-period sample r of period c.
struct Heatmap {
  std::size_t P = 0;
  std::size_t D = 0;
  std::vector<double> grid;  // row-major: grid[r * D + c]
  int label = kNonPool;
  bool normalized = false;
  std::string id;

  Heatmap() = default;
  Heatmap(std::size_t periods_len, std::size_t period_count, int label = kNonPool);

  double& at(std::size_t r, std::size_t c) { return grid[r * D + c]; }
  double at(std::size_t r, std::size_t c) const { return grid[r * D + c]; }

  void validate() const;
  friend bool operator==(const Heatmap&, const Heatmap&) = default;
};

struct FoldResult {
  Heatmap heatmap;
  /// Trailing samples that did not fill a whole period.
  std::size_t discarded = 0;
  bool truncated() const { return discarded != 0; }
};

/// Column-major fold: entry (r, c) = values[c * P + r]. A trailing partial
/// period is dropped and reported through FoldResult::discarded.
FoldResult fold(const LoadSeries& series, std::size_t P);

/// Inverse of fold: values[c * P + r] = grid(r, c). The sample period is
/// 1440 / P when P divides a day, otherwise 1.
LoadSeries unfold(const Heatmap& h);

/// Per-heatmap min-max scaling onto [0, 1]. A constant heatmap maps to zeros.
Heatmap normalize(const Heatmap& h);

/// Receptive field needed to see one feature that repeats at the same phase
/// over m consecutive periods.
struct KernelEconomy {
  std::size_t feature_span_periods = 0;  // m
  std::size_t period = 0;                // P
  std::size_t span_1d = 0;               // (m - 1) * P + 1 samples on the 1D signal
  std::size_t weights_2d = 0;            // m cells along the period axis
  std::size_t border_distance = 0;       // d
  std::size_t reduction_example_2d = 0;  // 2 * d for a centered object
};

KernelEconomy kernel_economy(std::size_t m, std::size_t P, std::size_t d);

}  // namespace foldgan
