#include <doctest.h>

#include <cmath>
#include <set>

#include "foldgan/loadsim.hpp"
#include "foldgan/rng.hpp"

using namespace foldgan;

namespace {

double profile_row(const SimConfig& cfg, std::size_t r) {
  double bump = 0.0;
  for (const double peak : {cfg.peak_hours.first, cfg.peak_hours.second}) {
    const double d = static_cast<double>(r) - peak;
    bump += std::exp(-d * d / (2.0 * cfg.peak_width * cfg.peak_width));
  }
  return cfg.base_mean * (1.0 + bump);
}

}  // namespace

TEST_CASE("zero noise non-pool household has identical columns") {
  SimConfig cfg;
  cfg.noise_sigma = 0.0;
  const Heatmap h = simulate_household(cfg, kNonPool, 3);
  for (std::size_t r = 0; r < h.P; ++r)
    for (std::size_t c = 1; c < h.D; ++c) CHECK(h.at(r, c) == h.at(r, 0));
  CHECK(h.normalized);
}

TEST_CASE("zero noise pool household adds exactly the pump amplitude inside the rectangle") {
  SimConfig cfg;
  cfg.noise_sigma = 0.0;
  cfg.pump_duty = 1.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const RawHousehold pool = simulate_household_raw(cfg, kPool, seed);
    const RawHousehold base = simulate_household_raw(cfg, kNonPool, seed);
    CHECK(pool.scale == base.scale);
    for (std::size_t c = 0; c < cfg.D; ++c) {
      const bool in_season = c >= cfg.pump_cols.first && c < cfg.pump_cols.second;
      double inside_min = INFINITY, outside_max = -INFINITY;
      for (std::size_t r = 0; r < cfg.P; ++r) {
        const bool inside = in_season && r >= cfg.pump_rows.first && r < cfg.pump_rows.second;
        const double diff = pool.heatmap.at(r, c) - base.heatmap.at(r, c);
        CHECK(diff == doctest::Approx(inside ? cfg.pump_amplitude : 0.0).epsilon(1e-12));
        if (inside)
          inside_min = std::min(inside_min, pool.heatmap.at(r, c));
        else
          outside_max = std::max(outside_max, pool.heatmap.at(r, c));
      }
      if (in_season) CHECK(inside_min > outside_max);
    }
  }
}

TEST_CASE("noise has the configured mean around the scaled base profile") {
  SimConfig cfg;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; count < 1000; ++seed) {
    const RawHousehold h = simulate_household_raw(cfg, kNonPool, seed);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < cfg.D && count < 1000; ++c, ++count)
        sum += h.heatmap.at(r, c) - profile_row(cfg, r) * h.scale;
  }
  CHECK(std::abs(sum / 1000.0) < 3.0 * cfg.noise_sigma / std::sqrt(1000.0));
}

TEST_CASE("pump days follow the duty cycle inside the season only") {
  SimConfig cfg;
  std::size_t on = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const RawHousehold h = simulate_household_raw(cfg, kPool, seed);
    REQUIRE(h.pump_days.size() == cfg.D);
    for (std::size_t c = 0; c < cfg.D; ++c) {
      if (c < cfg.pump_cols.first || c >= cfg.pump_cols.second) {
        CHECK_FALSE(h.pump_days[c]);
      } else {
        on += h.pump_days[c];
        ++total;
      }
    }
  }
  const double p = cfg.pump_duty, n = static_cast<double>(total);
  CHECK(std::abs(static_cast<double>(on) / n - p) < 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("label noise removes the pump from some pool households") {
  SimConfig cfg;
  cfg.label_noise = 1.0;
  const RawHousehold h = simulate_household_raw(cfg, kPool, 1);
  for (const bool d : h.pump_days) CHECK_FALSE(d);
}

TEST_CASE("simulate_dataset label counts") {
  SimConfig cfg;
  cfg.n_households = 869;
  cfg.pool_fraction = 58.0 / 869.0;
  const LabelledDataset ds = simulate_dataset(cfg);
  CHECK(ds.size() == 869);
  CHECK(ds.count(kPool) == 58);

  cfg.n_households = 100;
  cfg.pool_fraction = 0.1;
  const LabelledDataset small = simulate_dataset(cfg);
  CHECK(small.count(kPool) == 10);
  CHECK(small.count(kNonPool) == 90);
}

TEST_CASE("simulate_dataset is deterministic and valid") {
  SimConfig cfg;
  const LabelledDataset a = simulate_dataset(cfg);
  const LabelledDataset b = simulate_dataset(cfg);
  CHECK(a.items == b.items);
  CHECK(a.labels == b.labels);
  for (const Heatmap& h : a.items) {
    CHECK(h.normalized);
    CHECK_NOTHROW(h.validate());
    CHECK(h.P == cfg.P);
    CHECK(h.D == cfg.D);
  }
  cfg.seed = 43;
  CHECK(simulate_dataset(cfg).items != a.items);
}

TEST_CASE("household i uses the derived seed") {
  SimConfig cfg;
  cfg.n_households = 10;
  const LabelledDataset ds = simulate_dataset(cfg);
  for (std::size_t i = 0; i < ds.size(); ++i)
    CHECK(ds.items[i].grid == simulate_household(cfg, ds.labels[i], derive_seed(cfg.seed, i)).grid);
}

TEST_CASE("pool rectangle separates the classes on average") {
  SimConfig cfg;
  double pool = 0.0, nonpool = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Heatmap p = simulate_household(cfg, kPool, s);
    const Heatmap q = simulate_household(cfg, kNonPool, s + 1000);
    for (std::size_t r = cfg.pump_rows.first; r < cfg.pump_rows.second; ++r)
      for (std::size_t c = cfg.pump_cols.first; c < cfg.pump_cols.second; ++c) {
        pool += p.at(r, c);
        nonpool += q.at(r, c);
      }
  }
  CHECK(pool > nonpool);
}

TEST_CASE("invalid simulator configs are rejected") {
  const auto bad = [](auto mutate) {
    SimConfig cfg;
    mutate(cfg);
    return cfg;
  };
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.P = 20; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.D = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.pool_fraction = 1.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.base_mean = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.noise_sigma = -1.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.pump_amplitude = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.pump_duty = 0.0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.pump_rows = {5, 5}; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.pump_rows = {0, 25}; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](SimConfig& c) { c.pump_cols = {0, 33}; }).validate(), ConfigError);
  CHECK_THROWS_AS(simulate_household(bad([](SimConfig& c) { c.P = 7; }), kPool, 1), ConfigError);
  CHECK_THROWS_AS(simulate_dataset(bad([](SimConfig& c) { c.n_households = 1; })), ConfigError);
  CHECK_THROWS_AS(simulate_household(SimConfig{}, 2, 1), DataError);
}

TEST_CASE("stratified split preserves class counts") {
  LabelledDataset ds;
  for (int i = 0; i < 100; ++i) {
    Heatmap h(8, 8, i < 90 ? kNonPool : kPool);
    h.id = "h" + std::to_string(i);
    ds.items.push_back(h);
    ds.labels.push_back(h.label);
  }
  const auto [train, test] = split_dataset(ds, 0.5, 7);
  CHECK(train.count(kNonPool) == 45);
  CHECK(train.count(kPool) == 5);
  CHECK(test.count(kNonPool) == 45);
  CHECK(test.count(kPool) == 5);

  std::multiset<std::string> all;
  for (const auto* part : {&train, &test})
    for (const auto& h : part->items) all.insert(h.id);
  CHECK(all.size() == 100);
  CHECK(std::set<std::string>(all.begin(), all.end()).size() == 100);

  const auto [train2, test2] = split_dataset(ds, 0.5, 7);
  CHECK(train2.items == train.items);
  CHECK(test2.items == test.items);
}

TEST_CASE("split keeps every class on both sides") {
  LabelledDataset ds;
  for (int i = 0; i < 10; ++i) {
    ds.items.emplace_back(8, 8, i < 8 ? kNonPool : kPool);
    ds.labels.push_back(i < 8 ? kNonPool : kPool);
  }
  for (const double ratio : {0.01, 0.5, 0.99}) {
    const auto [train, test] = split_dataset(ds, ratio, 1);
    CHECK(train.count(kPool) >= 1);
    CHECK(test.count(kPool) >= 1);
    CHECK(train.count(kNonPool) >= 1);
    CHECK(test.count(kNonPool) >= 1);
  }
}

TEST_CASE("split needs two members per class") {
  LabelledDataset ds;
  for (int i = 0; i < 5; ++i) {
    ds.items.emplace_back(8, 8, i == 0 ? kPool : kNonPool);
    ds.labels.push_back(i == 0 ? kPool : kNonPool);
  }
  CHECK_THROWS_WITH_AS(split_dataset(ds, 0.5, 1), doctest::Contains("cannot stratify"), DataError);
  CHECK_THROWS_AS(split_dataset(ds, 1.0, 1), ConfigError);
}
