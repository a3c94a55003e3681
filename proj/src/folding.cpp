#include "foldgan/folding.hpp"

#include <algorithm>
#include <cmath>

namespace foldgan {

void LoadSeries::validate() const {
  if (values.empty()) throw DataError("series '" + id + "' is empty");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]) || values[i] < 0.0)
      throw DataError("series '" + id + "': reading " + std::to_string(i) + " is negative or not finite");
  if (sample_minutes <= 0 || 1440 % sample_minutes != 0)
    throw DataError("series '" + id + "': sample_minutes " + std::to_string(sample_minutes) +
                    " does not divide a day");
}

std::size_t LoadSeries::samples_per_day() const {
  if (sample_minutes <= 0 || 1440 % sample_minutes != 0)
    throw DataError("sample_minutes " + std::to_string(sample_minutes) + " does not divide a day");
  return static_cast<std::size_t>(1440 / sample_minutes);
}

Heatmap::Heatmap(std::size_t periods_len, std::size_t period_count, int label_)
    : P(periods_len), D(period_count), grid(periods_len * period_count, 0.0), label(label_) {}

void Heatmap::validate() const {
  if (P == 0 || D == 0) throw DataError("heatmap '" + id + "' has an empty dimension");
  if (grid.size() != P * D)
    throw DataError("heatmap '" + id + "' has " + std::to_string(grid.size()) + " entries, expected " +
                    std::to_string(P * D));
  for (const double v : grid) {
    if (!std::isfinite(v)) throw DataError("heatmap '" + id + "' has a non-finite entry");
    if (normalized && (v < 0.0 || v > 1.0)) throw DataError("heatmap '" + id + "' is flagged normalized but leaves [0, 1]");
  }
}

FoldResult fold(const LoadSeries& series, std::size_t P) {
  if (P == 0) throw DataError("period must be positive");
  if (series.values.size() < P) throw DataError("series shorter than one period");
  const std::size_t D = series.values.size() / P;
  FoldResult out;
  out.heatmap = Heatmap(P, D, series.label);
  out.heatmap.id = series.id;
  for (std::size_t c = 0; c < D; ++c)
    for (std::size_t r = 0; r < P; ++r) out.heatmap.at(r, c) = series.values[c * P + r];
  out.discarded = series.values.size() - P * D;
  return out;
}

LoadSeries unfold(const Heatmap& h) {
  h.validate();
  LoadSeries s;
  s.values.resize(h.P * h.D);
  for (std::size_t c = 0; c < h.D; ++c)
    for (std::size_t r = 0; r < h.P; ++r) s.values[c * h.P + r] = h.at(r, c);
  s.sample_minutes = 1440 % h.P == 0 ? static_cast<int>(1440 / h.P) : 1;
  s.label = h.label;
  s.id = h.id;
  return s;
}

Heatmap normalize(const Heatmap& h) {
  if (h.grid.size() != h.P * h.D || h.grid.empty()) throw DataError("heatmap '" + h.id + "' has inconsistent size");
  for (const double v : h.grid)
    if (!std::isfinite(v)) throw DataError("cannot normalize heatmap '" + h.id + "': non-finite entry");
  const auto [lo_it, hi_it] = std::minmax_element(h.grid.begin(), h.grid.end());
  const double lo = *lo_it, hi = *hi_it;
  Heatmap out = h;
  out.normalized = true;
  if (!(hi > lo)) {
    std::fill(out.grid.begin(), out.grid.end(), 0.0);
    return out;
  }
  const double range = hi - lo;
  for (double& v : out.grid) v = (v - lo) / range;
  return out;
}

KernelEconomy kernel_economy(std::size_t m, std::size_t P, std::size_t d) {
  if (m == 0 || P == 0) throw DataError("kernel_economy: m and P must be positive");
  KernelEconomy k;
  k.feature_span_periods = m;
  k.period = P;
  k.span_1d = (m - 1) * P + 1;
  k.weights_2d = m;
  k.border_distance = d;
  k.reduction_example_2d = 2 * d;
  return k;
}

}  // namespace foldgan
