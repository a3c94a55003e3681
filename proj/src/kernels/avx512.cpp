// AVX-512F GEMM micro-kernels. Only the packed (compute-bound) path lives
// here; skinny shapes and the elementwise kernels use the AVX2 variants.

#include <immintrin.h>

#include "foldgan/kernels/kernels.hpp"
#include "packed_gemm.hpp"

namespace foldgan::kernels::avx512 {

namespace {

// 8 rows x 2 vectors, 16 accumulators.
void micro_kernel(std::size_t kc, const float* ap, const float* bp, float* tile) {
  __m512 c[8][2];
  for (auto& row : c) row[0] = row[1] = _mm512_setzero_ps();
  for (std::size_t p = 0; p < kc; ++p) {
    const __m512 b0 = _mm512_loadu_ps(bp);
    const __m512 b1 = _mm512_loadu_ps(bp + 16);
#pragma GCC unroll 8
    for (int r = 0; r < 8; ++r) {
      const __m512 a = _mm512_set1_ps(ap[r]);
      c[r][0] = _mm512_fmadd_ps(a, b0, c[r][0]);
      c[r][1] = _mm512_fmadd_ps(a, b1, c[r][1]);
    }
    ap += 8;
    bp += 32;
  }
#pragma GCC unroll 8
  for (int r = 0; r < 8; ++r) {
    _mm512_storeu_ps(tile + r * 32, c[r][0]);
    _mm512_storeu_ps(tile + r * 32 + 16, c[r][1]);
  }
}

void micro_kernel(std::size_t kc, const double* ap, const double* bp, double* tile) {
  __m512d c[8][2];
  for (auto& row : c) row[0] = row[1] = _mm512_setzero_pd();
  for (std::size_t p = 0; p < kc; ++p) {
    const __m512d b0 = _mm512_loadu_pd(bp);
    const __m512d b1 = _mm512_loadu_pd(bp + 8);
#pragma GCC unroll 8
    for (int r = 0; r < 8; ++r) {
      const __m512d a = _mm512_set1_pd(ap[r]);
      c[r][0] = _mm512_fmadd_pd(a, b0, c[r][0]);
      c[r][1] = _mm512_fmadd_pd(a, b1, c[r][1]);
    }
    ap += 8;
    bp += 16;
  }
#pragma GCC unroll 8
  for (int r = 0; r < 8; ++r) {
    _mm512_storeu_pd(tile + r * 16, c[r][0]);
    _mm512_storeu_pd(tile + r * 16 + 8, c[r][1]);
  }
}

}  // namespace

template <typename T>
void gemm(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a, std::size_t lda,
          const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc) {
  // Skinny and degenerate shapes are bandwidth bound; the AVX2 unit has
  // dedicated paths for them.
  if (m <= 16 || k <= 16 || n < 16) {
    avx2::gemm(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
    return;
  }
  constexpr std::size_t nr = 64 / sizeof(T) * 2;
  packed_gemm<8, nr>([](std::size_t kc, const T* ap, const T* bp, T* tile) { micro_kernel(kc, ap, bp, tile); }, ta,
                     tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

template void gemm<float>(Trans, Trans, std::size_t, std::size_t, std::size_t, float, const float*, std::size_t,
                          const float*, std::size_t, float, float*, std::size_t);
template void gemm<double>(Trans, Trans, std::size_t, std::size_t, std::size_t, double, const double*, std::size_t,
                           const double*, std::size_t, double, double*, std::size_t);

}  // namespace foldgan::kernels::avx512
