#include "foldgan/nn/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace foldgan::nn {

template <typename T>
CrossEntropy<T> xent_loss(const Tensor<T>& probs, std::span<const int> labels) {
  if (probs.rank() != 2 || probs.dim(0) != labels.size())
    throw ShapeError("xent_loss: probs " + shape_string(probs.shape()) + " vs " + std::to_string(labels.size()) +
                     " labels");
  const std::size_t n = probs.dim(0), k = probs.dim(1);
  CrossEntropy<T> out;
  out.grad_logits = Tensor<T>(probs.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= k)
      throw std::out_of_range("xent_loss: label " + std::to_string(label) + " out of range");
    double p = static_cast<double>(probs[i * k + static_cast<std::size_t>(label)]);
    if (p < kProbabilityFloor) {
      p = kProbabilityFloor;
      out.clamped = true;
    }
    total -= std::log(p);
    for (std::size_t j = 0; j < k; ++j) {
      const T onehot = static_cast<std::size_t>(label) == j ? T{1} : T{0};
      out.grad_logits[i * k + j] = (probs[i * k + j] - onehot) / static_cast<T>(n);
    }
  }
  out.loss = static_cast<T>(total / static_cast<double>(n));
  return out;
}

template CrossEntropy<float> xent_loss<float>(const Tensor<float>&, std::span<const int>);
template CrossEntropy<double> xent_loss<double>(const Tensor<double>&, std::span<const int>);

}  // namespace foldgan::nn
