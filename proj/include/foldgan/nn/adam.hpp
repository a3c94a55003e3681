#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "foldgan/nn/layers.hpp"

namespace foldgan::nn {

/// Training hit a non-finite value.
class DivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Moments are kept per parameter tensor in the
/// order the parameters are passed to step().
template <typename T>
class Adam {
 public:
  Adam() = default;
  Adam(const std::vector<Param<T>*>& params, AdamConfig config);

  /// Applies one update from the gradients stored in params. Throws
  /// DivergedError if any gradient is non-finite; nothing is modified then.
  void step(const std::vector<Param<T>*>& params);

  const AdamConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }
  std::uint64_t steps() const { return t_; }
  void set_steps(std::uint64_t t) { t_ = t; }
  std::vector<Tensor<T>>& first_moments() { return m_; }
  std::vector<Tensor<T>>& second_moments() { return v_; }

 private:
  AdamConfig config_;
  std::uint64_t t_ = 0;
  std::vector<Tensor<T>> m_;
  std::vector<Tensor<T>> v_;
};

}  // namespace foldgan::nn
