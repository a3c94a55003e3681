#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "foldgan/nn/tensor.hpp"
#include "foldgan/rng.hpp"

namespace foldgan::nn {

/// train: batch statistics, running statistics updated.
/// train_fixed_stats: batch statistics, running statistics left untouched.
/// infer: running statistics.
enum class Mode { train, train_fixed_stats, infer };

enum class Padding { same, valid };

enum class LayerKind { conv2d, tconv2d, dense, batchnorm, leaky_relu, sigmoid, softmax, flatten, reshape };

std::string_view layer_kind_name(LayerKind kind);

/// Declarative description of one layer. Unused fields are ignored for
/// kinds that do not need them.
struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  std::size_t kernel_h = 5;
  std::size_t kernel_w = 5;
  std::size_t channels_out = 0;  // output channels (conv/tconv) or units (dense)
  std::size_t stride_h = 2;
  std::size_t stride_w = 2;
  Padding padding = Padding::same;
  double alpha = 0.2;  // leaky_relu slope
  Shape target;        // reshape: per-sample output shape

  static LayerSpec conv2d(std::size_t channels, std::size_t kernel = 5, std::size_t stride = 2,
                          Padding padding = Padding::same);
  static LayerSpec tconv2d(std::size_t channels, std::size_t kernel = 5, std::size_t stride = 2,
                           Padding padding = Padding::same);
  static LayerSpec dense(std::size_t units);
  static LayerSpec batchnorm();
  static LayerSpec leaky_relu(double alpha = 0.2);
  static LayerSpec sigmoid();
  static LayerSpec softmax();
  static LayerSpec flatten();
  static LayerSpec reshape(Shape target);
};

/// Convolution index arithmetic for one spatial configuration.
/// Same padding: out = ceil(in / stride), total padding
/// max((out - 1) * stride + kernel - in, 0) split with the extra pixel on
/// the bottom/right. Valid padding: out = (in - kernel) / stride + 1.
struct ConvGeometry {
  std::size_t in_c = 0, in_h = 0, in_w = 0;
  std::size_t out_c = 0, out_h = 0, out_w = 0;
  std::size_t kernel_h = 0, kernel_w = 0;
  std::size_t stride_h = 1, stride_w = 1;
  std::size_t pad_top = 0, pad_left = 0;

  static ConvGeometry make(std::size_t in_c, std::size_t in_h, std::size_t in_w, std::size_t out_c,
                           std::size_t kernel_h, std::size_t kernel_w, std::size_t stride_h,
                           std::size_t stride_w, Padding padding);

  std::size_t patch_size() const { return in_c * kernel_h * kernel_w; }
  std::size_t out_plane() const { return out_h * out_w; }
  std::size_t in_plane() const { return in_h * in_w; }
};

/// Unrolls a batch of CHW images into columns: row (c, ki, kj), column
/// b * out_plane + (oh * out_w + ow). `cols` has patch_size() rows.
template <typename T>
void im2col(const T* x, std::size_t batch, const ConvGeometry& g, T* cols);

/// Adjoint of im2col: scatters (accumulates) columns back into images. `x`
/// is overwritten.
template <typename T>
void col2im(const T* cols, std::size_t batch, const ConvGeometry& g, T* x);

template <typename T>
struct Param {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;
};

/// Named reference to a tensor that belongs in a checkpoint.
template <typename T>
struct StateRef {
  std::string name;
  Tensor<T>* tensor;
};

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;

  virtual LayerKind kind() const = 0;
  /// Per-sample output shape (no batch axis).
  virtual const Shape& output_shape() const = 0;

  virtual Tensor<T> forward(const Tensor<T>& x, Mode mode) = 0;
  /// Gradient w.r.t. the input of the last forward call. Parameter gradients
  /// are added to Param::grad when accumulate is set.
  virtual Tensor<T> backward(const Tensor<T>& dy, bool accumulate) = 0;

  virtual std::vector<Param<T>*> params() { return {}; }
  virtual std::vector<StateRef<T>> buffers() { return {}; }

  /// True when the layer is affine in its input and piecewise linear overall,
  /// so its input Jacobian is locally constant. Such layers support the
  /// directional-derivative pair below.
  virtual bool piecewise_linear() const { return false; }

  /// Jacobian-vector product at the operating point of rows
  /// [row0, row0 + t.dim(0)) of the last forward.
  virtual Tensor<T> tangent_forward(const Tensor<T>& t, std::size_t row0) const;

  /// Parameter gradients after a forward over N rows, given the gradient dy
  /// at this layer's output for all N rows. Rows [0, split) contribute the
  /// ordinary gradient (forward input paired with dy); rows [split, N)
  /// contribute the weight gradient with the tangent `t` (N - split rows)
  /// in place of the forward input, and nothing to biases. With `overwrite`
  /// the result replaces the stored gradients instead of adding to them.
  virtual void accumulate_split_grad(const Tensor<T>& /*t*/, const Tensor<T>& /*dy*/, std::size_t /*split*/,
                                     bool /*overwrite*/) {}

  /// Weight initialization: N(0, 0.02^2) weights, zero biases.
  virtual void init(Rng& /*rng*/) {}

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

 protected:
  std::string name_;
};

/// Builds a layer from its spec given the per-sample input shape.
template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& input_shape);

// Concrete layers. Declared here so tests can exercise them directly.

template <typename T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(const Shape& input_shape, std::size_t channels_out, std::size_t kernel_h,
         std::size_t kernel_w, std::size_t stride_h, std::size_t stride_w, Padding padding);

  LayerKind kind() const override { return LayerKind::conv2d; }
  const Shape& output_shape() const override { return out_shape_; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& dy, bool accumulate) override;
  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }
  bool piecewise_linear() const override { return true; }
  Tensor<T> tangent_forward(const Tensor<T>& t, std::size_t row0) const override;
  void accumulate_split_grad(const Tensor<T>& t, const Tensor<T>& dy, std::size_t split, bool overwrite) override;
  void init(Rng& rng) override;

  const ConvGeometry& geometry() const { return geom_; }
  Param<T>& weight() { return weight_; }
  Param<T>& bias() { return bias_; }

 private:
  ConvGeometry geom_;
  Shape out_shape_;
  Param<T> weight_;  // [out_c, in_c, kh, kw]
  Param<T> bias_;    // [out_c]
  std::vector<T> cols_;
  std::size_t batch_ = 0;
};

/// Transposed convolution: the adjoint of Conv2d with the same weights.
/// Weight layout [in_c, out_c, kh, kw], where in_c/out_c are the transposed
/// layer's own input/output channel counts.
template <typename T>
class TransposedConv2d final : public Layer<T> {
 public:
  TransposedConv2d(const Shape& input_shape, std::size_t channels_out, std::size_t kernel_h,
                   std::size_t kernel_w, std::size_t stride_h, std::size_t stride_w,
                   Padding padding);

  LayerKind kind() const override { return LayerKind::tconv2d; }
  const Shape& output_shape() const override { return out_shape_; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& dy, bool accumulate) override;
  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }
  bool piecewise_linear() const override { return true; }
  Tensor<T> tangent_forward(const Tensor<T>& t, std::size_t row0) const override;
  void accumulate_split_grad(const Tensor<T>& t, const Tensor<T>& dy, std::size_t split, bool overwrite) override;
  void init(Rng& rng) override;

  /// Geometry of the matching forward convolution (maps output -> input).
  const ConvGeometry& geometry() const { return geom_; }
  Param<T>& weight() { return weight_; }
  Param<T>& bias() { return bias_; }

 private:
  ConvGeometry geom_;
  Shape out_shape_;
  Param<T> weight_;
  Param<T> bias_;
  std::vector<T> x_mat_;  // [in_c, batch * in_plane]
  std::size_t batch_ = 0;
};

template <typename T>
class Dense final : public Layer<T> {
 public:
  Dense(const Shape& input_shape, std::size_t units);

  LayerKind kind() const override { return LayerKind::dense; }
  const Shape& output_shape() const override { return out_shape_; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& dy, bool accumulate) override;
  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }
  bool piecewise_linear() const override { return true; }
  Tensor<T> tangent_forward(const Tensor<T>& t, std::size_t row0) const override;
  void accumulate_split_grad(const Tensor<T>& t, const Tensor<T>& dy, std::size_t split, bool overwrite) override;
  void init(Rng& rng) override;

  Param<T>& weight() { return weight_; }  // [in, out]
  Param<T>& bias() { return bias_; }

 private:
  std::size_t in_ = 0, out_ = 0;
  Shape out_shape_;
  Param<T> weight_;
  Param<T> bias_;
  Tensor<T> x_;
};

/// Per-channel batch normalization over batch and spatial axes (rank 2 or 4
/// input). eps = 1e-5, running statistics with momentum 0.9.
template <typename T>
class BatchNorm final : public Layer<T> {
 public:
  static constexpr double kEps = 1e-5;
  static constexpr double kMomentum = 0.9;

  explicit BatchNorm(const Shape& input_shape);

  LayerKind kind() const override { return LayerKind::batchnorm; }
  const Shape& output_shape() const override { return shape_; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& dy, bool accumulate) override;
  std::vector<Param<T>*> params() override { return {&gamma_, &beta_}; }
  std::vector<StateRef<T>> buffers() override;
  void init(Rng& rng) override;

  Param<T>& gamma() { return gamma_; }
  Param<T>& beta() { return beta_; }
  Tensor<T>& running_mean() { return running_mean_; }
  Tensor<T>& running_var() { return running_var_; }

 private:
  Shape shape_;
  std::size_t channels_ = 0;
  Param<T> gamma_;
  Param<T> beta_;
  Tensor<T> running_mean_;
  Tensor<T> running_var_;
  Tensor<T> xhat_;
  std::vector<T> inv_std_;
  Mode last_mode_ = Mode::infer;
};

template <typename T>
class LeakyRelu final : public Layer<T> {
 public:
  LeakyRelu(const Shape& input_shape, double alpha) : shape_(input_shape), alpha_(static_cast<T>(alpha)) {}

  LayerKind kind() const override { return LayerKind::leaky_relu; }
  const Shape& output_shape() const override { return shape_; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& dy, bool accumulate) override;
  bool piecewise_linear() const override { return true; }
  Tensor<T> tangent_forward(const Tensor<T>& t, std::size_t row0) const override;
  T alpha() const { return alpha_; }

 private:
  Shape shape_;
  T alpha_;
  Tensor<T> x_;
};

template <typename T>
class Sigmoid final : public Layer<T> {
 public:
  explicit Sigmoid(const Shape& input_shape) : shape_(input_shape) {}
  LayerKind kind() const override { return LayerKind::sigmoid; }
  const Shape& output_shape() const override { return shape_; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& dy, bool accumulate) override;

 private:
  Shape shape_;
  Tensor<T> y_;
};

/// Softmax over the last axis of a rank-2 input.
template <typename T>
class Softmax final : public Layer<T> {
 public:
  explicit Softmax(const Shape& input_shape);
  LayerKind kind() const override { return LayerKind::softmax; }
  const Shape& output_shape() const override { return shape_; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& dy, bool accumulate) override;

 private:
  Shape shape_;
  Tensor<T> y_;
};

/// Reinterprets the per-sample shape; covers both flatten and reshape.
template <typename T>
class Reshape final : public Layer<T> {
 public:
  Reshape(LayerKind kind, const Shape& input_shape, Shape target);
  LayerKind kind() const override { return kind_; }
  const Shape& output_shape() const override { return target_; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& dy, bool accumulate) override;
  bool piecewise_linear() const override { return true; }
  Tensor<T> tangent_forward(const Tensor<T>& t, std::size_t row0) const override;

 private:
  LayerKind kind_;
  Shape input_;
  Shape target_;
};

}  // namespace foldgan::nn
