#pragma once

// Inner-loop arithmetic used by the network layers. Every kernel has a
// portable scalar reference implementation and an AVX2+FMA variant; GEMM
// additionally has an AVX-512F variant. The best supported set is chosen at
// runtime from CPUID and can be capped with the FOLDGAN_KERNELS environment
// variable ("scalar", "avx2" or "avx512").

#include <cstddef>
#include <span>
#include <string_view>

namespace foldgan::kernels {

enum class Isa { scalar, avx2, avx512 };

enum class Trans { no, yes };

/// Best instruction set the running CPU supports.
Isa detected_isa();

/// Instruction set currently used by the dispatching entry points.
Isa active_isa();

/// Overrides the active instruction set. A request beyond what the CPU
/// supports falls back to the best supported set below it.
void set_active_isa(Isa isa);

std::string_view isa_name(Isa isa);

/// Row-major C = alpha * op(A) * op(B) + beta * C, where op(A) is m x k and
/// op(B) is k x n. When beta == 0, C is overwritten without being read.
template <typename T>
void gemm(Trans trans_a, Trans trans_b, std::size_t m, std::size_t n, std::size_t k, T alpha,
          const T* a, std::size_t lda, const T* b, std::size_t ldb, T beta, T* c,
          std::size_t ldc);

/// One Adam update over a flat parameter block:
///   m = b1*m + (1-b1)*g;  v = b2*v + (1-b2)*g*g
///   p -= lr * (m / bc1) / (sqrt(v / bc2) + eps)
/// with bc1, bc2 the bias corrections for the current step. Both variants
/// perform the same IEEE operations in the same order and agree bitwise.
template <typename T>
void adam_update(std::span<T> param, std::span<const T> grad, std::span<T> m, std::span<T> v,
                 T lr, T beta1, T beta2, T eps, T bias_correction1, T bias_correction2);

/// y = x >= 0 ? x : alpha * x
template <typename T>
void leaky_relu(std::span<const T> x, std::span<T> y, T alpha);

/// dx = x >= 0 ? dy : alpha * dy (mask taken from the forward input x)
template <typename T>
void leaky_relu_backward(std::span<const T> x, std::span<const T> dy, std::span<T> dx, T alpha);

/// True when no entry is NaN or infinite.
template <typename T>
bool all_finite(std::span<const T> x);

// The implementations, exposed for equivalence testing.
namespace scalar {
template <typename T>
void gemm(Trans trans_a, Trans trans_b, std::size_t m, std::size_t n, std::size_t k, T alpha,
          const T* a, std::size_t lda, const T* b, std::size_t ldb, T beta, T* c,
          std::size_t ldc);
template <typename T>
void adam_update(std::span<T> param, std::span<const T> grad, std::span<T> m, std::span<T> v,
                 T lr, T beta1, T beta2, T eps, T bias_correction1, T bias_correction2);
template <typename T>
void leaky_relu(std::span<const T> x, std::span<T> y, T alpha);
template <typename T>
void leaky_relu_backward(std::span<const T> x, std::span<const T> dy, std::span<T> dx, T alpha);
template <typename T>
bool all_finite(std::span<const T> x);
}  // namespace scalar

namespace avx2 {
template <typename T>
void gemm(Trans trans_a, Trans trans_b, std::size_t m, std::size_t n, std::size_t k, T alpha,
          const T* a, std::size_t lda, const T* b, std::size_t ldb, T beta, T* c,
          std::size_t ldc);
template <typename T>
void adam_update(std::span<T> param, std::span<const T> grad, std::span<T> m, std::span<T> v,
                 T lr, T beta1, T beta2, T eps, T bias_correction1, T bias_correction2);
template <typename T>
void leaky_relu(std::span<const T> x, std::span<T> y, T alpha);
template <typename T>
void leaky_relu_backward(std::span<const T> x, std::span<const T> dy, std::span<T> dx, T alpha);
template <typename T>
bool all_finite(std::span<const T> x);
}  // namespace avx2

namespace avx512 {
template <typename T>
void gemm(Trans trans_a, Trans trans_b, std::size_t m, std::size_t n, std::size_t k, T alpha,
          const T* a, std::size_t lda, const T* b, std::size_t ldb, T beta, T* c,
          std::size_t ldc);
}  // namespace avx512

}  // namespace foldgan::kernels
