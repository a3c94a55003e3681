#include "foldgan/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace foldgan::kernels {

namespace {

Isa probe() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return Isa::scalar;
  return __builtin_cpu_supports("avx512f") ? Isa::avx512 : Isa::avx2;
#endif
  return Isa::scalar;
}

Isa clamp(Isa requested, Isa best) { return static_cast<int>(requested) <= static_cast<int>(best) ? requested : best; }

Isa initial_isa() {
  const Isa best = probe();
  if (const char* env = std::getenv("FOLDGAN_KERNELS")) {
    const std::string_view v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2") return clamp(Isa::avx2, best);
  }
  return best;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

Isa detected_isa() {
  static const Isa isa = probe();
  return isa;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) { active().store(clamp(isa, detected_isa()), std::memory_order_relaxed); }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::avx2: return "avx2";
    case Isa::avx512: return "avx512";
    default: return "scalar";
  }
}

template <typename T>
void gemm(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a,
          std::size_t lda, const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc) {
  switch (active_isa()) {
    case Isa::avx512: avx512::gemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc); break;
    case Isa::avx2: avx2::gemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc); break;
    default: scalar::gemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc); break;
  }
}

template <typename T>
void adam_update(std::span<T> param, std::span<const T> grad, std::span<T> m, std::span<T> v,
                 T lr, T beta1, T beta2, T eps, T bc1, T bc2) {
  if (active_isa() != Isa::scalar)
    avx2::adam_update(param, grad, m, v, lr, beta1, beta2, eps, bc1, bc2);
  else
    scalar::adam_update(param, grad, m, v, lr, beta1, beta2, eps, bc1, bc2);
}

template <typename T>
void leaky_relu(std::span<const T> x, std::span<T> y, T alpha) {
  if (active_isa() != Isa::scalar)
    avx2::leaky_relu(x, y, alpha);
  else
    scalar::leaky_relu(x, y, alpha);
}

template <typename T>
void leaky_relu_backward(std::span<const T> x, std::span<const T> dy, std::span<T> dx, T alpha) {
  if (active_isa() != Isa::scalar)
    avx2::leaky_relu_backward(x, dy, dx, alpha);
  else
    scalar::leaky_relu_backward(x, dy, dx, alpha);
}

template <typename T>
bool all_finite(std::span<const T> x) {
  return active_isa() != Isa::scalar ? avx2::all_finite(x) : scalar::all_finite(x);
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

}  // namespace foldgan::kernels
