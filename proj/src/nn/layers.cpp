#include "foldgan/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "foldgan/kernels/kernels.hpp"

namespace foldgan::nn {

using kernels::Trans;

std::string_view layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::conv2d: return "conv2d";
    case LayerKind::tconv2d: return "tconv2d";
    case LayerKind::dense: return "dense";
    case LayerKind::batchnorm: return "batchnorm";
    case LayerKind::leaky_relu: return "leaky_relu";
    case LayerKind::sigmoid: return "sigmoid";
    case LayerKind::softmax: return "softmax";
    case LayerKind::flatten: return "flatten";
    case LayerKind::reshape: return "reshape";
  }
  return "unknown";
}

LayerSpec LayerSpec::conv2d(std::size_t channels, std::size_t kernel, std::size_t stride, Padding padding) {
  LayerSpec s;
  s.kind = LayerKind::conv2d;
  s.channels_out = channels;
  s.kernel_h = s.kernel_w = kernel;
  s.stride_h = s.stride_w = stride;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::tconv2d(std::size_t channels, std::size_t kernel, std::size_t stride, Padding padding) {
  LayerSpec s = conv2d(channels, kernel, stride, padding);
  s.kind = LayerKind::tconv2d;
  return s;
}

LayerSpec LayerSpec::dense(std::size_t units) {
  LayerSpec s;
  s.kind = LayerKind::dense;
  s.channels_out = units;
  return s;
}

LayerSpec LayerSpec::batchnorm() {
  LayerSpec s;
  s.kind = LayerKind::batchnorm;
  return s;
}

LayerSpec LayerSpec::leaky_relu(double alpha) {
  LayerSpec s;
  s.kind = LayerKind::leaky_relu;
  s.alpha = alpha;
  return s;
}

LayerSpec LayerSpec::sigmoid() {
  LayerSpec s;
  s.kind = LayerKind::sigmoid;
  return s;
}

LayerSpec LayerSpec::softmax() {
  LayerSpec s;
  s.kind = LayerKind::softmax;
  return s;
}

LayerSpec LayerSpec::flatten() {
  LayerSpec s;
  s.kind = LayerKind::flatten;
  return s;
}

LayerSpec LayerSpec::reshape(Shape target) {
  LayerSpec s;
  s.kind = LayerKind::reshape;
  s.target = std::move(target);
  return s;
}

ConvGeometry ConvGeometry::make(std::size_t in_c, std::size_t in_h, std::size_t in_w, std::size_t out_c,
                                std::size_t kernel_h, std::size_t kernel_w, std::size_t stride_h,
                                std::size_t stride_w, Padding padding) {
  if (in_c == 0 || in_h == 0 || in_w == 0 || out_c == 0 || kernel_h == 0 || kernel_w == 0 ||
      stride_h == 0 || stride_w == 0)
    throw ShapeError("convolution dimensions must be positive");
  ConvGeometry g;
  g.in_c = in_c;
  g.in_h = in_h;
  g.in_w = in_w;
  g.out_c = out_c;
  g.kernel_h = kernel_h;
  g.kernel_w = kernel_w;
  g.stride_h = stride_h;
  g.stride_w = stride_w;
  if (padding == Padding::same) {
    g.out_h = (in_h + stride_h - 1) / stride_h;
    g.out_w = (in_w + stride_w - 1) / stride_w;
    const std::size_t need_h = (g.out_h - 1) * stride_h + kernel_h;
    const std::size_t need_w = (g.out_w - 1) * stride_w + kernel_w;
    g.pad_top = need_h > in_h ? (need_h - in_h) / 2 : 0;
    g.pad_left = need_w > in_w ? (need_w - in_w) / 2 : 0;
  } else {
    if (in_h < kernel_h || in_w < kernel_w)
      throw ShapeError("valid convolution: input " + std::to_string(in_h) + "x" + std::to_string(in_w) +
                       " smaller than kernel " + std::to_string(kernel_h) + "x" + std::to_string(kernel_w));
    g.out_h = (in_h - kernel_h) / stride_h + 1;
    g.out_w = (in_w - kernel_w) / stride_w + 1;
  }
  return g;
}

template <typename T>
void im2col(const T* x, std::size_t batch, const ConvGeometry& g, T* cols) {
  const std::size_t plane = g.out_plane();
  const std::size_t n = batch * plane;
  const auto ih0 = static_cast<std::ptrdiff_t>(g.pad_top);
  const auto iw0 = static_cast<std::ptrdiff_t>(g.pad_left);
  for (std::size_t c = 0; c < g.in_c; ++c) {
    for (std::size_t ki = 0; ki < g.kernel_h; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel_w; ++kj) {
        T* row = cols + ((c * g.kernel_h + ki) * g.kernel_w + kj) * n;
        for (std::size_t b = 0; b < batch; ++b) {
          const T* img = x + (b * g.in_c + c) * g.in_plane();
          T* out = row + b * plane;
          for (std::size_t oh = 0; oh < g.out_h; ++oh) {
            const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * g.stride_h + ki) - ih0;
            T* orow = out + oh * g.out_w;
            if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(g.in_h)) {
              std::fill(orow, orow + g.out_w, T{0});
              continue;
            }
            const T* irow = img + static_cast<std::size_t>(ih) * g.in_w;
            for (std::size_t ow = 0; ow < g.out_w; ++ow) {
              const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow * g.stride_w + kj) - iw0;
              orow[ow] = (iw < 0 || iw >= static_cast<std::ptrdiff_t>(g.in_w)) ? T{0} : irow[iw];
            }
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const T* cols, std::size_t batch, const ConvGeometry& g, T* x) {
  std::fill(x, x + batch * g.in_c * g.in_plane(), T{0});
  const std::size_t plane = g.out_plane();
  const std::size_t n = batch * plane;
  const auto ih0 = static_cast<std::ptrdiff_t>(g.pad_top);
  const auto iw0 = static_cast<std::ptrdiff_t>(g.pad_left);
  for (std::size_t c = 0; c < g.in_c; ++c) {
    for (std::size_t ki = 0; ki < g.kernel_h; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel_w; ++kj) {
        const T* row = cols + ((c * g.kernel_h + ki) * g.kernel_w + kj) * n;
        for (std::size_t b = 0; b < batch; ++b) {
          T* img = x + (b * g.in_c + c) * g.in_plane();
          const T* src = row + b * plane;
          for (std::size_t oh = 0; oh < g.out_h; ++oh) {
            const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * g.stride_h + ki) - ih0;
            if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(g.in_h)) continue;
            T* irow = img + static_cast<std::size_t>(ih) * g.in_w;
            const T* srow = src + oh * g.out_w;
            for (std::size_t ow = 0; ow < g.out_w; ++ow) {
              const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow * g.stride_w + kj) - iw0;
              if (iw >= 0 && iw < static_cast<std::ptrdiff_t>(g.in_w)) irow[iw] += srow[ow];
            }
          }
        }
      }
    }
  }
}

namespace {

// [B, C, P] <-> [C, B * P]
template <typename T>
void to_channel_major(const T* src, std::size_t batch, std::size_t channels, std::size_t plane, T* dst) {
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < channels; ++c)
      std::copy_n(src + (b * channels + c) * plane, plane, dst + (c * batch + b) * plane);
}

template <typename T>
void from_channel_major(const T* src, std::size_t batch, std::size_t channels, std::size_t plane, T* dst) {
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t c = 0; c < channels; ++c)
      std::copy_n(src + (c * batch + b) * plane, plane, dst + (b * channels + c) * plane);
}

void check_rank4(const Shape& got, std::size_t c, std::size_t h, std::size_t w, std::string_view layer) {
  if (got.size() != 4 || got[0] == 0 || got[1] != c || got[2] != h || got[3] != w)
    throw ShapeError(std::string(layer) + ": expected input [N x " + std::to_string(c) + " x " +
                     std::to_string(h) + " x " + std::to_string(w) + "], got " + shape_string(got));
}

template <typename T>
void gaussian_fill(Tensor<T>& t, Rng& rng, double sigma) {
  for (auto& v : t.data()) v = static_cast<T>(sigma * rng.normal());
}

Shape expect_chw(const Shape& s, std::string_view layer) {
  if (s.size() != 3) throw ShapeError(std::string(layer) + ": expected per-sample CxHxW input, got " + shape_string(s));
  return s;
}

}  // namespace

template <typename T>
Tensor<T> Layer<T>::tangent_forward(const Tensor<T>&, std::size_t) const {
  throw std::logic_error(std::string(layer_kind_name(kind())) +
                         " is not piecewise linear; directional derivatives are unsupported");
}

// ---------------------------------------------------------------- Conv2d

template <typename T>
Conv2d<T>::Conv2d(const Shape& input_shape, std::size_t channels_out, std::size_t kernel_h, std::size_t kernel_w,
                  std::size_t stride_h, std::size_t stride_w, Padding padding) {
  const Shape s = expect_chw(input_shape, "conv2d");
  geom_ = ConvGeometry::make(s[0], s[1], s[2], channels_out, kernel_h, kernel_w, stride_h, stride_w, padding);
  out_shape_ = {channels_out, geom_.out_h, geom_.out_w};
  weight_ = {"weight", Tensor<T>({channels_out, s[0], kernel_h, kernel_w}),
             Tensor<T>({channels_out, s[0], kernel_h, kernel_w})};
  bias_ = {"bias", Tensor<T>({channels_out}), Tensor<T>({channels_out})};
}

template <typename T>
void Conv2d<T>::init(Rng& rng) {
  gaussian_fill(weight_.value, rng, 0.02);
  bias_.value.fill(T{0});
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x, Mode) {
  check_rank4(x.shape(), geom_.in_c, geom_.in_h, geom_.in_w, "conv2d");
  batch_ = x.dim(0);
  const std::size_t k = geom_.patch_size();
  const std::size_t n = batch_ * geom_.out_plane();
  cols_.resize(k * n);
  im2col(x.ptr(), batch_, geom_, cols_.data());
  std::vector<T> ymat(geom_.out_c * n);
  kernels::gemm<T>(Trans::no, Trans::no, geom_.out_c, n, k, T{1}, weight_.value.ptr(), k, cols_.data(), n,
                   T{0}, ymat.data(), n);
  for (std::size_t c = 0; c < geom_.out_c; ++c) {
    const T b = bias_.value[c];
    for (std::size_t j = 0; j < n; ++j) ymat[c * n + j] += b;
  }
  Tensor<T> y({batch_, geom_.out_c, geom_.out_h, geom_.out_w});
  from_channel_major(ymat.data(), batch_, geom_.out_c, geom_.out_plane(), y.ptr());
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& dy, bool accumulate) {
  check_rank4(dy.shape(), geom_.out_c, geom_.out_h, geom_.out_w, "conv2d backward");
  if (dy.dim(0) != batch_) throw ShapeError("conv2d backward: batch differs from forward");
  const std::size_t k = geom_.patch_size();
  const std::size_t n = batch_ * geom_.out_plane();
  std::vector<T> dymat(geom_.out_c * n);
  to_channel_major(dy.ptr(), batch_, geom_.out_c, geom_.out_plane(), dymat.data());
  if (accumulate) {
    kernels::gemm<T>(Trans::no, Trans::yes, geom_.out_c, k, n, T{1}, dymat.data(), n, cols_.data(), n, T{1},
                     weight_.grad.ptr(), k);
    for (std::size_t c = 0; c < geom_.out_c; ++c) {
      T s{0};
      for (std::size_t j = 0; j < n; ++j) s += dymat[c * n + j];
      bias_.grad[c] += s;
    }
  }
  std::vector<T> dcols(k * n);
  kernels::gemm<T>(Trans::yes, Trans::no, k, n, geom_.out_c, T{1}, weight_.value.ptr(), k, dymat.data(), n,
                   T{0}, dcols.data(), n);
  Tensor<T> dx({batch_, geom_.in_c, geom_.in_h, geom_.in_w});
  col2im(dcols.data(), batch_, geom_, dx.ptr());
  return dx;
}

template <typename T>
Tensor<T> Conv2d<T>::tangent_forward(const Tensor<T>& t, std::size_t) const {
  check_rank4(t.shape(), geom_.in_c, geom_.in_h, geom_.in_w, "conv2d tangent");
  const std::size_t batch = t.dim(0);
  const std::size_t k = geom_.patch_size();
  const std::size_t n = batch * geom_.out_plane();
  std::vector<T> cols(k * n);
  im2col(t.ptr(), batch, geom_, cols.data());
  std::vector<T> ymat(geom_.out_c * n);
  kernels::gemm<T>(Trans::no, Trans::no, geom_.out_c, n, k, T{1}, weight_.value.ptr(), k, cols.data(), n, T{0},
                   ymat.data(), n);
  Tensor<T> y({batch, geom_.out_c, geom_.out_h, geom_.out_w});
  from_channel_major(ymat.data(), batch, geom_.out_c, geom_.out_plane(), y.ptr());
  return y;
}

template <typename T>
void Conv2d<T>::accumulate_split_grad(const Tensor<T>& t, const Tensor<T>& dy, std::size_t split, bool overwrite) {
  check_rank4(dy.shape(), geom_.out_c, geom_.out_h, geom_.out_w, "conv2d split gradient");
  const std::size_t batch = dy.dim(0);
  const std::size_t tail = batch - split;
  if (split > batch || (split > 0 && batch != batch_)) throw ShapeError("conv2d split gradient: batch differs from forward");
  if (tail > 0) check_rank4(t.shape(), geom_.in_c, geom_.in_h, geom_.in_w, "conv2d tangent");
  if (tail > 0 && t.dim(0) != tail) throw ShapeError("conv2d split gradient: tangent rows differ from batch tail");
  const std::size_t k = geom_.patch_size();
  const std::size_t plane = geom_.out_plane();
  const std::size_t n = batch * plane;
  std::vector<T> dymat(geom_.out_c * n);
  to_channel_major(dy.ptr(), batch, geom_.out_c, plane, dymat.data());
  T beta = overwrite ? T{0} : T{1};
  if (split > 0) {
    kernels::gemm<T>(Trans::no, Trans::yes, geom_.out_c, k, split * plane, T{1}, dymat.data(), n, cols_.data(), n,
                     beta, weight_.grad.ptr(), k);
    beta = T{1};
  }
  if (tail > 0) {
    std::vector<T> cols(k * tail * plane);
    im2col(t.ptr(), tail, geom_, cols.data());
    kernels::gemm<T>(Trans::no, Trans::yes, geom_.out_c, k, tail * plane, T{1}, dymat.data() + split * plane, n,
                     cols.data(), tail * plane, beta, weight_.grad.ptr(), k);
  } else if (split == 0 && overwrite) {
    weight_.grad.fill(T{0});
  }
  for (std::size_t c = 0; c < geom_.out_c; ++c) {
    T sum{0};
    for (std::size_t j = 0; j < split * plane; ++j) sum += dymat[c * n + j];
    bias_.grad[c] = overwrite ? sum : bias_.grad[c] + sum;
  }
}

// ------------------------------------------------------ TransposedConv2d

template <typename T>
TransposedConv2d<T>::TransposedConv2d(const Shape& input_shape, std::size_t channels_out, std::size_t kernel_h,
                                      std::size_t kernel_w, std::size_t stride_h, std::size_t stride_w,
                                      Padding padding) {
  const Shape s = expect_chw(input_shape, "tconv2d");
  std::size_t out_h, out_w;
  if (padding == Padding::same) {
    out_h = s[1] * stride_h;
    out_w = s[2] * stride_w;
  } else {
    out_h = (s[1] - 1) * stride_h + kernel_h;
    out_w = (s[2] - 1) * stride_w + kernel_w;
  }
  geom_ = ConvGeometry::make(channels_out, out_h, out_w, s[0], kernel_h, kernel_w, stride_h, stride_w, padding);
  if (geom_.out_h != s[1] || geom_.out_w != s[2]) throw ShapeError("tconv2d: inconsistent transposed geometry");
  out_shape_ = {channels_out, out_h, out_w};
  weight_ = {"weight", Tensor<T>({s[0], channels_out, kernel_h, kernel_w}),
             Tensor<T>({s[0], channels_out, kernel_h, kernel_w})};
  bias_ = {"bias", Tensor<T>({channels_out}), Tensor<T>({channels_out})};
}

template <typename T>
void TransposedConv2d<T>::init(Rng& rng) {
  gaussian_fill(weight_.value, rng, 0.02);
  bias_.value.fill(T{0});
}

template <typename T>
Tensor<T> TransposedConv2d<T>::forward(const Tensor<T>& x, Mode) {
  Tensor<T> y = tangent_forward(x, 0);
  batch_ = x.dim(0);
  x_mat_.resize(x.size());
  to_channel_major(x.ptr(), batch_, geom_.out_c, geom_.out_plane(), x_mat_.data());
  const std::size_t plane = geom_.in_plane();
  for (std::size_t b = 0; b < batch_; ++b)
    for (std::size_t c = 0; c < geom_.in_c; ++c) {
      const T bias = bias_.value[c];
      T* p = y.ptr() + (b * geom_.in_c + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) p[i] += bias;
    }
  return y;
}

template <typename T>
Tensor<T> TransposedConv2d<T>::tangent_forward(const Tensor<T>& t, std::size_t) const {
  // Transposed layer input = forward-conv output: [N, g.out_c, g.out_h, g.out_w].
  check_rank4(t.shape(), geom_.out_c, geom_.out_h, geom_.out_w, "tconv2d");
  const std::size_t batch = t.dim(0);
  const std::size_t k = geom_.patch_size();
  const std::size_t n = batch * geom_.out_plane();
  std::vector<T> tmat(t.size());
  to_channel_major(t.ptr(), batch, geom_.out_c, geom_.out_plane(), tmat.data());
  std::vector<T> cols(k * n);
  kernels::gemm<T>(Trans::yes, Trans::no, k, n, geom_.out_c, T{1}, weight_.value.ptr(), k, tmat.data(), n, T{0},
                   cols.data(), n);
  Tensor<T> y({batch, geom_.in_c, geom_.in_h, geom_.in_w});
  col2im(cols.data(), batch, geom_, y.ptr());
  return y;
}

template <typename T>
Tensor<T> TransposedConv2d<T>::backward(const Tensor<T>& dy, bool accumulate) {
  check_rank4(dy.shape(), geom_.in_c, geom_.in_h, geom_.in_w, "tconv2d backward");
  if (dy.dim(0) != batch_) throw ShapeError("tconv2d backward: batch differs from forward");
  const std::size_t k = geom_.patch_size();
  const std::size_t n = batch_ * geom_.out_plane();
  std::vector<T> cols(k * n);
  im2col(dy.ptr(), batch_, geom_, cols.data());
  if (accumulate) {
    kernels::gemm<T>(Trans::no, Trans::yes, geom_.out_c, k, n, T{1}, x_mat_.data(), n, cols.data(), n, T{1},
                     weight_.grad.ptr(), k);
    const std::size_t plane = geom_.in_plane();
    for (std::size_t c = 0; c < geom_.in_c; ++c) {
      T s{0};
      for (std::size_t b = 0; b < batch_; ++b) {
        const T* p = dy.ptr() + (b * geom_.in_c + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) s += p[i];
      }
      bias_.grad[c] += s;
    }
  }
  std::vector<T> dxm(geom_.out_c * n);
  kernels::gemm<T>(Trans::no, Trans::no, geom_.out_c, n, k, T{1}, weight_.value.ptr(), k, cols.data(), n, T{0},
                   dxm.data(), n);
  Tensor<T> dx({batch_, geom_.out_c, geom_.out_h, geom_.out_w});
  from_channel_major(dxm.data(), batch_, geom_.out_c, geom_.out_plane(), dx.ptr());
  return dx;
}

template <typename T>
void TransposedConv2d<T>::accumulate_split_grad(const Tensor<T>& t, const Tensor<T>& dy, std::size_t split,
                                                bool overwrite) {
  check_rank4(dy.shape(), geom_.in_c, geom_.in_h, geom_.in_w, "tconv2d split gradient");
  const std::size_t batch = dy.dim(0);
  const std::size_t tail = batch - split;
  if (split > batch || (split > 0 && batch != batch_)) throw ShapeError("tconv2d split gradient: batch differs from forward");
  if (tail > 0) check_rank4(t.shape(), geom_.out_c, geom_.out_h, geom_.out_w, "tconv2d tangent");
  if (tail > 0 && t.dim(0) != tail) throw ShapeError("tconv2d split gradient: tangent rows differ from batch tail");
  const std::size_t k = geom_.patch_size();
  const std::size_t plane = geom_.out_plane();
  const std::size_t n = batch * plane;
  std::vector<T> cols(k * n);
  im2col(dy.ptr(), batch, geom_, cols.data());
  T beta = overwrite ? T{0} : T{1};
  if (split > 0) {
    kernels::gemm<T>(Trans::no, Trans::yes, geom_.out_c, k, split * plane, T{1}, x_mat_.data(), n, cols.data(), n,
                     beta, weight_.grad.ptr(), k);
    beta = T{1};
  }
  if (tail > 0) {
    std::vector<T> tmat(t.size());
    to_channel_major(t.ptr(), tail, geom_.out_c, plane, tmat.data());
    kernels::gemm<T>(Trans::no, Trans::yes, geom_.out_c, k, tail * plane, T{1}, tmat.data(), tail * plane,
                     cols.data() + split * plane, n, beta, weight_.grad.ptr(), k);
  } else if (split == 0 && overwrite) {
    weight_.grad.fill(T{0});
  }
  const std::size_t in_plane = geom_.in_plane();
  for (std::size_t c = 0; c < geom_.in_c; ++c) {
    T sum{0};
    for (std::size_t b = 0; b < split; ++b) {
      const T* p = dy.ptr() + (b * geom_.in_c + c) * in_plane;
      for (std::size_t i = 0; i < in_plane; ++i) sum += p[i];
    }
    bias_.grad[c] = overwrite ? sum : bias_.grad[c] + sum;
  }
}

// ----------------------------------------------------------------- Dense

template <typename T>
Dense<T>::Dense(const Shape& input_shape, std::size_t units) {
  if (input_shape.size() != 1)
    throw ShapeError("dense: expected flat per-sample input, got " + shape_string(input_shape));
  if (units == 0) throw ShapeError("dense: units must be positive");
  in_ = input_shape[0];
  out_ = units;
  out_shape_ = {units};
  weight_ = {"weight", Tensor<T>({in_, out_}), Tensor<T>({in_, out_})};
  bias_ = {"bias", Tensor<T>({out_}), Tensor<T>({out_})};
}

template <typename T>
void Dense<T>::init(Rng& rng) {
  gaussian_fill(weight_.value, rng, 0.02);
  bias_.value.fill(T{0});
}

template <typename T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x, Mode) {
  Tensor<T> y = tangent_forward(x, 0);
  x_ = x;
  const std::size_t batch = x.dim(0);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t j = 0; j < out_; ++j) y[b * out_ + j] += bias_.value[j];
  return y;
}

template <typename T>
Tensor<T> Dense<T>::tangent_forward(const Tensor<T>& t, std::size_t) const {
  if (t.rank() != 2 || t.dim(1) != in_)
    throw ShapeError("dense: expected input [N x " + std::to_string(in_) + "], got " + shape_string(t.shape()));
  const std::size_t batch = t.dim(0);
  Tensor<T> y({batch, out_});
  kernels::gemm<T>(Trans::no, Trans::no, batch, out_, in_, T{1}, t.ptr(), in_, weight_.value.ptr(), out_, T{0},
                   y.ptr(), out_);
  return y;
}

template <typename T>
Tensor<T> Dense<T>::backward(const Tensor<T>& dy, bool accumulate) {
  if (dy.rank() != 2 || dy.dim(1) != out_ || dy.dim(0) != x_.dim(0))
    throw ShapeError("dense backward: expected [" + std::to_string(x_.dim(0)) + " x " + std::to_string(out_) +
                     "], got " + shape_string(dy.shape()));
  const std::size_t batch = dy.dim(0);
  if (accumulate) {
    kernels::gemm<T>(Trans::yes, Trans::no, in_, out_, batch, T{1}, x_.ptr(), in_, dy.ptr(), out_, T{1},
                     weight_.grad.ptr(), out_);
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t j = 0; j < out_; ++j) bias_.grad[j] += dy[b * out_ + j];
  }
  Tensor<T> dx({batch, in_});
  kernels::gemm<T>(Trans::no, Trans::yes, batch, in_, out_, T{1}, dy.ptr(), out_, weight_.value.ptr(), out_, T{0},
                   dx.ptr(), in_);
  return dx;
}

template <typename T>
void Dense<T>::accumulate_split_grad(const Tensor<T>& t, const Tensor<T>& dy, std::size_t split, bool overwrite) {
  if (dy.rank() != 2 || dy.dim(1) != out_) throw ShapeError("dense split gradient: bad output gradient " + shape_string(dy.shape()));
  const std::size_t batch = dy.dim(0);
  const std::size_t tail = batch - split;
  if (split > batch || (split > 0 && batch != x_.dim(0))) throw ShapeError("dense split gradient: batch differs from forward");
  if (tail > 0 && (t.rank() != 2 || t.dim(1) != in_ || t.dim(0) != tail))
    throw ShapeError("dense split gradient: tangent " + shape_string(t.shape()) + " does not match the batch tail");
  // Stack forward rows and tangent rows so the weight gradient is one GEMM.
  const T* u = t.ptr();
  std::vector<T> stacked;
  if (split > 0) {
    if (tail == 0) {
      u = x_.ptr();
    } else {
      stacked.resize(batch * in_);
      std::copy_n(x_.ptr(), split * in_, stacked.begin());
      std::copy_n(t.ptr(), tail * in_, stacked.begin() + static_cast<std::ptrdiff_t>(split * in_));
      u = stacked.data();
    }
  }
  kernels::gemm<T>(Trans::yes, Trans::no, in_, out_, batch, T{1}, u, in_, dy.ptr(), out_, overwrite ? T{0} : T{1},
                   weight_.grad.ptr(), out_);
  for (std::size_t j = 0; j < out_; ++j) {
    T sum{0};
    for (std::size_t b = 0; b < split; ++b) sum += dy[b * out_ + j];
    bias_.grad[j] = overwrite ? sum : bias_.grad[j] + sum;
  }
}

// ------------------------------------------------------------- BatchNorm

template <typename T>
BatchNorm<T>::BatchNorm(const Shape& input_shape) : shape_(input_shape) {
  if (input_shape.size() != 1 && input_shape.size() != 3)
    throw ShapeError("batchnorm: expected per-sample [C] or [C x H x W], got " + shape_string(input_shape));
  channels_ = input_shape[0];
  gamma_ = {"gamma", Tensor<T>({channels_}, T{1}), Tensor<T>({channels_})};
  beta_ = {"beta", Tensor<T>({channels_}), Tensor<T>({channels_})};
  running_mean_ = Tensor<T>({channels_});
  running_var_ = Tensor<T>({channels_}, T{1});
}

template <typename T>
std::vector<StateRef<T>> BatchNorm<T>::buffers() {
  return {{"running_mean", &running_mean_}, {"running_var", &running_var_}};
}

template <typename T>
void BatchNorm<T>::init(Rng&) {
  gamma_.value.fill(T{1});
  beta_.value.fill(T{0});
  running_mean_.fill(T{0});
  running_var_.fill(T{1});
}

template <typename T>
Tensor<T> BatchNorm<T>::forward(const Tensor<T>& x, Mode mode) {
  if (x.rank() != shape_.size() + 1 || !std::equal(shape_.begin(), shape_.end(), x.shape().begin() + 1))
    throw ShapeError("batchnorm: expected per-sample " + shape_string(shape_) + ", got " + shape_string(x.shape()));
  const std::size_t batch = x.dim(0);
  const std::size_t plane = x.size() / (batch * channels_);
  if (mode != Mode::infer && batch < 2) throw std::invalid_argument("batchnorm: train mode needs a batch of at least 2");
  last_mode_ = mode;
  xhat_ = Tensor<T>(x.shape());
  inv_std_.assign(channels_, T{0});
  Tensor<T> y(x.shape());
  const double count = static_cast<double>(batch * plane);
  for (std::size_t c = 0; c < channels_; ++c) {
    double mean, var;
    if (mode == Mode::infer) {
      mean = static_cast<double>(running_mean_[c]);
      var = static_cast<double>(running_var_[c]);
    } else {
      double s = 0.0;
      for (std::size_t b = 0; b < batch; ++b) {
        const T* p = x.ptr() + (b * channels_ + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) s += static_cast<double>(p[i]);
      }
      mean = s / count;
      double ss = 0.0;
      for (std::size_t b = 0; b < batch; ++b) {
        const T* p = x.ptr() + (b * channels_ + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) {
          const double d = static_cast<double>(p[i]) - mean;
          ss += d * d;
        }
      }
      var = ss / count;
      if (mode == Mode::train) {
        running_mean_[c] = static_cast<T>(kMomentum * static_cast<double>(running_mean_[c]) + (1.0 - kMomentum) * mean);
        running_var_[c] = static_cast<T>(kMomentum * static_cast<double>(running_var_[c]) + (1.0 - kMomentum) * var);
      }
    }
    const T inv = static_cast<T>(1.0 / std::sqrt(var + kEps));
    const T m = static_cast<T>(mean);
    inv_std_[c] = inv;
    const T g = gamma_.value[c], be = beta_.value[c];
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t off = (b * channels_ + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        const T xh = (x[off + i] - m) * inv;
        xhat_[off + i] = xh;
        y[off + i] = g * xh + be;
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm<T>::backward(const Tensor<T>& dy, bool accumulate) {
  if (dy.shape() != xhat_.shape()) throw ShapeError("batchnorm backward: shape differs from forward");
  const std::size_t batch = dy.dim(0);
  const std::size_t plane = dy.size() / (batch * channels_);
  const T count = static_cast<T>(batch * plane);
  Tensor<T> dx(dy.shape());
  for (std::size_t c = 0; c < channels_; ++c) {
    T sum_dy{0}, sum_dy_xhat{0};
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t off = (b * channels_ + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        sum_dy += dy[off + i];
        sum_dy_xhat += dy[off + i] * xhat_[off + i];
      }
    }
    if (accumulate) {
      gamma_.grad[c] += sum_dy_xhat;
      beta_.grad[c] += sum_dy;
    }
    const T g = gamma_.value[c];
    const T inv = inv_std_[c];
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t off = (b * channels_ + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        if (last_mode_ == Mode::infer)
          dx[off + i] = dy[off + i] * g * inv;
        else
          dx[off + i] = g * inv / count * (count * dy[off + i] - sum_dy - xhat_[off + i] * sum_dy_xhat);
      }
    }
  }
  return dx;
}

// ------------------------------------------------------------ activations

template <typename T>
Tensor<T> LeakyRelu<T>::forward(const Tensor<T>& x, Mode) {
  x_ = x;
  Tensor<T> y(x.shape());
  kernels::leaky_relu<T>(x.data(), y.data(), alpha_);
  return y;
}

template <typename T>
Tensor<T> LeakyRelu<T>::backward(const Tensor<T>& dy, bool) {
  if (dy.shape() != x_.shape()) throw ShapeError("leaky_relu backward: shape differs from forward");
  Tensor<T> dx(dy.shape());
  kernels::leaky_relu_backward<T>(x_.data(), dy.data(), dx.data(), alpha_);
  return dx;
}

template <typename T>
Tensor<T> LeakyRelu<T>::tangent_forward(const Tensor<T>& t, std::size_t row0) const {
  if (t.rank() != x_.rank() || t.rank() == 0 || row0 + t.dim(0) > x_.dim(0) ||
      !std::equal(t.shape().begin() + 1, t.shape().end(), x_.shape().begin() + 1))
    throw ShapeError("leaky_relu tangent: " + shape_string(t.shape()) + " is not a row block of the forward input " +
                     shape_string(x_.shape()));
  Tensor<T> out(t.shape());
  const std::size_t row = x_.size() / x_.dim(0);
  kernels::leaky_relu_backward<T>(x_.data().subspan(row0 * row, t.size()), t.data(), out.data(), alpha_);
  return out;
}

template <typename T>
Tensor<T> Sigmoid<T>::forward(const Tensor<T>& x, Mode) {
  y_ = Tensor<T>(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T v = x[i];
    if (v >= T{0}) {
      y_[i] = T{1} / (T{1} + std::exp(-v));
    } else {
      const T e = std::exp(v);
      y_[i] = e / (T{1} + e);
    }
  }
  return y_;
}

template <typename T>
Tensor<T> Sigmoid<T>::backward(const Tensor<T>& dy, bool) {
  if (dy.shape() != y_.shape()) throw ShapeError("sigmoid backward: shape differs from forward");
  Tensor<T> dx(dy.shape());
  for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * y_[i] * (T{1} - y_[i]);
  return dx;
}

template <typename T>
Softmax<T>::Softmax(const Shape& input_shape) : shape_(input_shape) {
  if (input_shape.size() != 1) throw ShapeError("softmax: expected flat per-sample input, got " + shape_string(input_shape));
}

template <typename T>
Tensor<T> Softmax<T>::forward(const Tensor<T>& x, Mode) {
  if (x.rank() != 2) throw ShapeError("softmax: expected rank-2 input, got " + shape_string(x.shape()));
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  y_ = Tensor<T>(x.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = x.ptr() + r * cols;
    T* out = y_.ptr() + r * cols;
    const T mx = *std::max_element(in, in + cols);
    T sum{0};
    for (std::size_t j = 0; j < cols; ++j) {
      out[j] = std::exp(in[j] - mx);
      sum += out[j];
    }
    for (std::size_t j = 0; j < cols; ++j) out[j] /= sum;
  }
  return y_;
}

template <typename T>
Tensor<T> Softmax<T>::backward(const Tensor<T>& dy, bool) {
  if (dy.shape() != y_.shape()) throw ShapeError("softmax backward: shape differs from forward");
  const std::size_t rows = dy.dim(0), cols = dy.dim(1);
  Tensor<T> dx(dy.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    T s{0};
    for (std::size_t j = 0; j < cols; ++j) s += dy[r * cols + j] * y_[r * cols + j];
    for (std::size_t j = 0; j < cols; ++j) dx[r * cols + j] = y_[r * cols + j] * (dy[r * cols + j] - s);
  }
  return dx;
}

// --------------------------------------------------------------- Reshape

template <typename T>
Reshape<T>::Reshape(LayerKind kind, const Shape& input_shape, Shape target)
    : kind_(kind), input_(input_shape), target_(std::move(target)) {
  if (kind_ == LayerKind::flatten) target_ = {shape_size(input_)};
  if (shape_size(target_) != shape_size(input_))
    throw ShapeError("reshape: cannot map " + shape_string(input_) + " to " + shape_string(target_));
}

template <typename T>
Tensor<T> Reshape<T>::forward(const Tensor<T>& x, Mode) {
  return tangent_forward(x, 0);
}

template <typename T>
Tensor<T> Reshape<T>::tangent_forward(const Tensor<T>& t, std::size_t) const {
  Shape s{t.dim(0)};
  s.insert(s.end(), target_.begin(), target_.end());
  return t.reshaped(std::move(s));
}

template <typename T>
Tensor<T> Reshape<T>::backward(const Tensor<T>& dy, bool) {
  Shape s{dy.dim(0)};
  s.insert(s.end(), input_.begin(), input_.end());
  return dy.reshaped(std::move(s));
}

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& in) {
  switch (spec.kind) {
    case LayerKind::conv2d:
      return std::make_unique<Conv2d<T>>(in, spec.channels_out, spec.kernel_h, spec.kernel_w, spec.stride_h,
                                         spec.stride_w, spec.padding);
    case LayerKind::tconv2d:
      return std::make_unique<TransposedConv2d<T>>(in, spec.channels_out, spec.kernel_h, spec.kernel_w,
                                                   spec.stride_h, spec.stride_w, spec.padding);
    case LayerKind::dense: return std::make_unique<Dense<T>>(in, spec.channels_out);
    case LayerKind::batchnorm: return std::make_unique<BatchNorm<T>>(in);
    case LayerKind::leaky_relu: return std::make_unique<LeakyRelu<T>>(in, spec.alpha);
    case LayerKind::sigmoid: return std::make_unique<Sigmoid<T>>(in);
    case LayerKind::softmax: return std::make_unique<Softmax<T>>(in);
    case LayerKind::flatten: return std::make_unique<Reshape<T>>(LayerKind::flatten, in, Shape{});
    case LayerKind::reshape: return std::make_unique<Reshape<T>>(LayerKind::reshape, in, spec.target);
  }
  throw std::invalid_argument("unknown layer kind");
}

#define FOLDGAN_INSTANTIATE(T)                                                             \
  template void im2col<T>(const T*, std::size_t, const ConvGeometry&, T*);                 \
  template void col2im<T>(const T*, std::size_t, const ConvGeometry&, T*);                 \
  template class Layer<T>;                                                                 \
  template class Conv2d<T>;                                                                \
  template class TransposedConv2d<T>;                                                      \
  template class Dense<T>;                                                                 \
  template class BatchNorm<T>;                                                             \
  template class LeakyRelu<T>;                                                             \
  template class Sigmoid<T>;                                                               \
  template class Softmax<T>;                                                               \
  template class Reshape<T>;                                                               \
  template std::unique_ptr<Layer<T>> make_layer<T>(const LayerSpec&, const Shape&);

FOLDGAN_INSTANTIATE(float)
FOLDGAN_INSTANTIATE(double)

#undef FOLDGAN_INSTANTIATE

}  // namespace foldgan::nn
