#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "foldgan/nn/layers.hpp"

namespace foldgan::nn {

/// A feed-forward stack of layers built from LayerSpecs. Copying a network
/// deep-copies its parameters and buffers (caches are not copied).
template <typename T>
class Network {
 public:
  Network() = default;
  Network(std::string name, Shape input_shape, std::vector<LayerSpec> specs, std::uint64_t seed);

  Network(const Network& other);
  Network& operator=(const Network& other);
  Network(Network&&) noexcept = default;
  Network& operator=(Network&&) noexcept = default;

  const std::string& name() const { return name_; }
  const Shape& input_shape() const { return input_shape_; }
  const Shape& output_shape() const;
  const std::vector<LayerSpec>& specs() const { return specs_; }
  std::size_t size() const { return layers_.size(); }
  Layer<T>& layer(std::size_t i) { return *layers_.at(i); }
  const Layer<T>& layer(std::size_t i) const { return *layers_.at(i); }

  Tensor<T> forward(const Tensor<T>& x, Mode mode);

  /// Backpropagates dy from the network output. `skip_last` layers at the
  /// top are bypassed, i.e. dy is the gradient at the output of layer
  /// size() - 1 - skip_last.
  Tensor<T> backward(const Tensor<T>& dy, bool accumulate = true, std::size_t skip_last = 0);

  /// As backward, additionally storing the gradient arriving at each
  /// layer's output (index i = output of layer i).
  Tensor<T> backward_recording(const Tensor<T>& dy, std::vector<Tensor<T>>& output_grads, bool accumulate);

  /// For networks made only of piecewise-linear layers: adds to the
  /// parameter gradients d/dtheta <direction, grad_x f>, where grad_x f is
  /// the input gradient whose per-layer output gradients were recorded by
  /// backward_recording after the last forward. Throws if any layer is not
  /// piecewise linear.
  void accumulate_input_gradient_jvp(const Tensor<T>& direction, const std::vector<Tensor<T>>& output_grads);

  /// Combined parameter gradient after a forward over N rows and
  /// backward_recording: rows [0, split) contribute the ordinary gradient of
  /// the recorded dy, rows [split, N) the input-gradient JVP along
  /// `direction` (N - split rows). With `overwrite` the stored gradients are
  /// replaced, so no zero_grad is needed.
  void accumulate_split_gradients(const Tensor<T>& direction, std::size_t split,
                                  const std::vector<Tensor<T>>& output_grads, bool overwrite);

  bool piecewise_linear() const;

  void zero_grad();
  std::vector<Param<T>*> params();
  /// Parameters followed by buffers, with qualified names, in a fixed order.
  std::vector<StateRef<T>> state();
  std::size_t parameter_count() const;

  /// Copy of this network with parameters and buffers converted to U.
  template <typename U>
  Network<U> converted() const;

 private:
  void build(std::uint64_t seed);

  std::string name_;
  Shape input_shape_;
  std::vector<LayerSpec> specs_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

template <typename T>
template <typename U>
Network<U> Network<T>::converted() const {
  Network<U> out(name_, input_shape_, specs_, 0);
  auto src = const_cast<Network<T>*>(this)->state();
  auto dst = out.state();
  for (std::size_t i = 0; i < src.size(); ++i) *dst[i].tensor = src[i].tensor->template cast<U>();
  return out;
}

}  // namespace foldgan::nn
