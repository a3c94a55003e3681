#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "foldgan/folding.hpp"
#include "foldgan/loadsim.hpp"
#include "foldgan/nn/tensor.hpp"
#include "foldgan/rng.hpp"

namespace testing {

template <typename T>
foldgan::nn::Tensor<T> random_tensor(foldgan::nn::Shape shape, std::uint64_t seed, double scale = 1.0) {
  foldgan::nn::Tensor<T> t(std::move(shape));
  foldgan::Rng rng(seed);
  for (auto& v : t.data()) v = static_cast<T>(scale * rng.normal());
  return t;
}

inline std::size_t uniform_int(foldgan::Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

/// n normalized 8x8 heatmaps, each one Gaussian blob (sigma 1.5) near the
/// center with jittered position.
inline foldgan::LabelledDataset blob_dataset(std::size_t n, std::uint64_t seed, int label = foldgan::kNonPool) {
  foldgan::Rng rng(seed);
  foldgan::LabelledDataset ds;
  ds.seed = seed;
  for (std::size_t k = 0; k < n; ++k) {
    foldgan::Heatmap h(8, 8, label);
    const double cr = 3.5 + 0.5 * rng.normal(), cc = 3.5 + 0.5 * rng.normal();
    for (std::size_t r = 0; r < 8; ++r)
      for (std::size_t c = 0; c < 8; ++c) {
        const double dr = static_cast<double>(r) - cr, dc = static_cast<double>(c) - cc;
        h.at(r, c) = std::exp(-(dr * dr + dc * dc) / (2.0 * 1.5 * 1.5));
      }
    h.id = "blob" + std::to_string(k);
    ds.items.push_back(foldgan::normalize(h));
    ds.labels.push_back(label);
  }
  return ds;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("foldgan_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
