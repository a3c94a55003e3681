#include "foldgan/loadsim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "foldgan/rng.hpp"

namespace foldgan {

void SimConfig::validate() const {
  const auto fail = [](const std::string& what) { throw ConfigError("simulator config: " + what); };
  if (P == 0 || D == 0) fail("P and D must be positive");
  if (P % 8 != 0 || D % 8 != 0) fail("P and D must be divisible by 8 (three stride-2 generator upsamplings)");
  if (n_households == 0) fail("n_households must be positive");
  if (!(pool_fraction > 0.0 && pool_fraction < 1.0)) fail("pool_fraction must lie in (0, 1)");
  if (!(base_mean > 0.0)) fail("base_mean must be positive");
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
  if (!(peak_width > 0.0)) fail("peak_width must be positive");
  if (!(scale_sigma >= 0.0)) fail("scale_sigma must be >= 0");
  if (!(pump_amplitude > 0.0)) fail("pump_amplitude must be positive");
  if (!(pump_duty > 0.0 && pump_duty <= 1.0)) fail("pump_duty must lie in (0, 1]");
  if (!(label_noise >= 0.0 && label_noise <= 1.0)) fail("label_noise must lie in [0, 1]");
  if (!(pump_rows.first < pump_rows.second && pump_rows.second <= P)) fail("pump rows must satisfy 0 <= r0 < r1 <= P");
  if (!(pump_cols.first < pump_cols.second && pump_cols.second <= D / 2))
    fail("pump columns must satisfy 0 <= c0 < c1 <= D/2");
}

std::size_t LabelledDataset::count(int label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void LabelledDataset::validate() const {
  if (items.size() != labels.size()) throw DataError("dataset: item and label counts differ");
  for (std::size_t i = 0; i < items.size(); ++i) {
    items[i].validate();
    if (items[i].P != items.front().P || items[i].D != items.front().D)
      throw DataError("dataset: heatmap " + std::to_string(i) + " has a different shape");
    if (items[i].label != labels[i]) throw DataError("dataset: label mismatch at item " + std::to_string(i));
  }
}

RawHousehold simulate_household_raw(const SimConfig& cfg, int label, std::uint64_t seed) {
  cfg.validate();
  if (label != kNonPool && label != kPool) throw DataError("unknown class label " + std::to_string(label));
  Rng rng(seed);
  RawHousehold out;
  out.scale = std::exp(cfg.scale_sigma * rng.normal());

  std::vector<double> profile(cfg.P);
  for (std::size_t r = 0; r < cfg.P; ++r) {
    double bump = 0.0;
    for (const double peak : {cfg.peak_hours.first, cfg.peak_hours.second}) {
      const double d = static_cast<double>(r) - peak;
      bump += std::exp(-d * d / (2.0 * cfg.peak_width * cfg.peak_width));
    }
    profile[r] = cfg.base_mean * (1.0 + bump);
  }

  Heatmap& h = out.heatmap;
  h = Heatmap(cfg.P, cfg.D, label);
  for (std::size_t c = 0; c < cfg.D; ++c)
    for (std::size_t r = 0; r < cfg.P; ++r)
      h.at(r, c) = std::max(0.0, profile[r] * out.scale + cfg.noise_sigma * rng.normal());

  if (label == kPool) {
    const bool pump_present = !(cfg.label_noise > 0.0 && rng.bernoulli(cfg.label_noise));
    out.pump_days.assign(cfg.D, false);
    for (std::size_t c = cfg.pump_cols.first; c < cfg.pump_cols.second; ++c) {
      const bool on = rng.bernoulli(cfg.pump_duty);
      out.pump_days[c] = pump_present && on;
      if (!out.pump_days[c]) continue;
      for (std::size_t r = cfg.pump_rows.first; r < cfg.pump_rows.second; ++r) h.at(r, c) += cfg.pump_amplitude;
    }
  }
  return out;
}

Heatmap simulate_household(const SimConfig& cfg, int label, std::uint64_t seed) {
  return normalize(simulate_household_raw(cfg, label, seed).heatmap);
}

LabelledDataset simulate_dataset(const SimConfig& cfg) {
  cfg.validate();
  if (cfg.n_households < 2) throw ConfigError("simulate_dataset needs at least 2 households");
  const std::size_t n = cfg.n_households;
  const auto n_pool = static_cast<std::size_t>(std::llround(cfg.pool_fraction * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng label_rng(derive_seed(cfg.seed, stream::labels));
  label_rng.shuffle(order.begin(), order.end());
  std::vector<int> labels(n, kNonPool);
  for (std::size_t i = 0; i < n_pool; ++i) labels[order[i]] = kPool;

  LabelledDataset ds;
  ds.seed = cfg.seed;
  ds.items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Heatmap h = simulate_household(cfg, labels[i], derive_seed(cfg.seed, i));
    h.id = "hh" + std::to_string(i);
    ds.items.push_back(std::move(h));
    ds.labels.push_back(labels[i]);
  }
  return ds;
}

std::pair<LabelledDataset, LabelledDataset> split_dataset(const LabelledDataset& ds, double train_ratio,
                                                          std::uint64_t seed) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw ConfigError("train_ratio must lie in (0, 1)");
  std::vector<bool> to_train(ds.size(), false);
  for (const int label : {kNonPool, kPool}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (ds.labels[i] == label) idx.push_back(i);
    if (idx.size() < 2)
      throw DataError("cannot stratify: class " + std::to_string(label) + " has " + std::to_string(idx.size()) +
                      " member(s)");
    Rng rng(derive_seed(derive_seed(seed, stream::split), static_cast<std::uint64_t>(label)));
    rng.shuffle(idx.begin(), idx.end());
    auto n_train = static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(idx.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    for (std::size_t i = 0; i < n_train; ++i) to_train[idx[i]] = true;
  }
  LabelledDataset train, test;
  train.seed = test.seed = ds.seed;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto& dst = to_train[i] ? train : test;
    dst.items.push_back(ds.items[i]);
    dst.labels.push_back(ds.labels[i]);
  }
  return {std::move(train), std::move(test)};
}

LabelledDataset class_slice(const LabelledDataset& ds, int label) {
  LabelledDataset out;
  out.seed = ds.seed;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.labels[i] != label) continue;
    out.items.push_back(ds.items[i]);
    out.labels.push_back(label);
  }
  return out;
}

LabelledDataset concat(const LabelledDataset& a, const LabelledDataset& b) {
  LabelledDataset out = a;
  out.items.insert(out.items.end(), b.items.begin(), b.items.end());
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  return out;
}

}  // namespace foldgan
