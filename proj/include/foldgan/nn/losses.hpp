#pragma once

#include <span>

#include "foldgan/nn/tensor.hpp"

namespace foldgan::nn {

/// Probabilities below this are clamped before taking the log.
inline constexpr double kProbabilityFloor = 1e-12;

template <typename T>
struct CrossEntropy {
  T loss{};
  /// Gradient w.r.t. the pre-softmax logits: (probs - onehot) / batch.
  Tensor<T> grad_logits;
  /// Set when some true-class probability hit the floor.
  bool clamped = false;
};

/// Mean negative log-likelihood of softmax outputs `probs` [N x K] for class
/// indices `labels`.
template <typename T>
CrossEntropy<T> xent_loss(const Tensor<T>& probs, std::span<const int> labels);

}  // namespace foldgan::nn
