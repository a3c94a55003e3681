#include <algorithm>
#include <cassert>
#include <cmath>
#include <vector>

#include "foldgan/kernels/kernels.hpp"

namespace foldgan::kernels::scalar {

template <typename T>
void gemm(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a,
          std::size_t lda, const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc) {
  const auto a_at = [&](std::size_t i, std::size_t p) {
    return ta == Trans::no ? a[i * lda + p] : a[p * lda + i];
  };
  if (tb == Trans::no) {
    // Row update form: contiguous B rows.
    std::vector<T> acc(n);
    for (std::size_t i = 0; i < m; ++i) {
      std::fill(acc.begin(), acc.end(), T{0});
      for (std::size_t p = 0; p < k; ++p) {
        const T av = a_at(i, p);
        const T* brow = b + p * ldb;
        for (std::size_t j = 0; j < n; ++j) acc[j] += av * brow[j];
      }
      T* crow = c + i * ldc;
      for (std::size_t j = 0; j < n; ++j)
        crow[j] = beta == T{0} ? alpha * acc[j] : alpha * acc[j] + beta * crow[j];
    }
    return;
  }
  for (std::size_t i = 0; i < m; ++i) {
    T* crow = c + i * ldc;
    for (std::size_t j = 0; j < n; ++j) {
      const T* bcol = b + j * ldb;
      T acc{0};
      for (std::size_t p = 0; p < k; ++p) acc += a_at(i, p) * bcol[p];
      crow[j] = beta == T{0} ? alpha * acc : alpha * acc + beta * crow[j];
    }
  }
}

template <typename T>
void adam_update(std::span<T> param, std::span<const T> grad, std::span<T> m, std::span<T> v,
                 T lr, T beta1, T beta2, T eps, T bc1, T bc2) {
  assert(param.size() == grad.size() && m.size() == grad.size() && v.size() == grad.size());
  const T one_minus_b1 = T{1} - beta1;
  const T one_minus_b2 = T{1} - beta2;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const T g = grad[i];
    const T mi = beta1 * m[i] + one_minus_b1 * g;
    const T vi = beta2 * v[i] + one_minus_b2 * (g * g);
    m[i] = mi;
    v[i] = vi;
    const T denom = std::sqrt(vi / bc2) + eps;
    param[i] = param[i] - lr * ((mi / bc1) / denom);
  }
}

template <typename T>
void leaky_relu(std::span<const T> x, std::span<T> y, T alpha) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] >= T{0} ? x[i] : alpha * x[i];
}

template <typename T>
void leaky_relu_backward(std::span<const T> x, std::span<const T> dy, std::span<T> dx, T alpha) {
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] >= T{0} ? dy[i] : alpha * dy[i];
}

template <typename T>
bool all_finite(std::span<const T> x) {
  for (const T v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

#define FOLDGAN_INSTANTIATE(T)                                                                  \
  template void gemm<T>(Trans, Trans, std::size_t, std::size_t, std::size_t, T, const T*,       \
                        std::size_t, const T*, std::size_t, T, T*, std::size_t);                \
  template void adam_update<T>(std::span<T>, std::span<const T>, std::span<T>, std::span<T>, T, \
                               T, T, T, T, T);                                                  \
  template void leaky_relu<T>(std::span<const T>, std::span<T>, T);                             \
  template void leaky_relu_backward<T>(std::span<const T>, std::span<const T>, std::span<T>, T); \
  template bool all_finite<T>(std::span<const T>);

FOLDGAN_INSTANTIATE(float)
FOLDGAN_INSTANTIATE(double)

#undef FOLDGAN_INSTANTIATE

}  // namespace foldgan::kernels::scalar
