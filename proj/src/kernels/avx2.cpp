// AVX2 + FMA kernels. This translation unit is the only one compiled with
// -mavx2 -mfma; callers reach it through the dispatcher after a CPUID check.

#include <immintrin.h>

#include <algorithm>
#include <cassert>
#include <vector>

#include "foldgan/kernels/kernels.hpp"
#include "packed_gemm.hpp"

namespace foldgan::kernels::avx2 {

namespace {

void micro_kernel(std::size_t kc, const float* ap, const float* bp, float* tile) {
  __m256 c00 = _mm256_setzero_ps(), c01 = _mm256_setzero_ps();
  __m256 c10 = _mm256_setzero_ps(), c11 = _mm256_setzero_ps();
  __m256 c20 = _mm256_setzero_ps(), c21 = _mm256_setzero_ps();
  __m256 c30 = _mm256_setzero_ps(), c31 = _mm256_setzero_ps();
  __m256 c40 = _mm256_setzero_ps(), c41 = _mm256_setzero_ps();
  __m256 c50 = _mm256_setzero_ps(), c51 = _mm256_setzero_ps();
  for (std::size_t p = 0; p < kc; ++p) {
    const __m256 b0 = _mm256_loadu_ps(bp);
    const __m256 b1 = _mm256_loadu_ps(bp + 8);
    __m256 a = _mm256_broadcast_ss(ap + 0);
    c00 = _mm256_fmadd_ps(a, b0, c00);
    c01 = _mm256_fmadd_ps(a, b1, c01);
    a = _mm256_broadcast_ss(ap + 1);
    c10 = _mm256_fmadd_ps(a, b0, c10);
    c11 = _mm256_fmadd_ps(a, b1, c11);
    a = _mm256_broadcast_ss(ap + 2);
    c20 = _mm256_fmadd_ps(a, b0, c20);
    c21 = _mm256_fmadd_ps(a, b1, c21);
    a = _mm256_broadcast_ss(ap + 3);
    c30 = _mm256_fmadd_ps(a, b0, c30);
    c31 = _mm256_fmadd_ps(a, b1, c31);
    a = _mm256_broadcast_ss(ap + 4);
    c40 = _mm256_fmadd_ps(a, b0, c40);
    c41 = _mm256_fmadd_ps(a, b1, c41);
    a = _mm256_broadcast_ss(ap + 5);
    c50 = _mm256_fmadd_ps(a, b0, c50);
    c51 = _mm256_fmadd_ps(a, b1, c51);
    ap += 6;
    bp += 16;
  }
  _mm256_storeu_ps(tile + 0, c00);
  _mm256_storeu_ps(tile + 8, c01);
  _mm256_storeu_ps(tile + 16, c10);
  _mm256_storeu_ps(tile + 24, c11);
  _mm256_storeu_ps(tile + 32, c20);
  _mm256_storeu_ps(tile + 40, c21);
  _mm256_storeu_ps(tile + 48, c30);
  _mm256_storeu_ps(tile + 56, c31);
  _mm256_storeu_ps(tile + 64, c40);
  _mm256_storeu_ps(tile + 72, c41);
  _mm256_storeu_ps(tile + 80, c50);
  _mm256_storeu_ps(tile + 88, c51);
}

void micro_kernel(std::size_t kc, const double* ap, const double* bp, double* tile) {
  __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
  __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
  __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
  __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();
  __m256d c40 = _mm256_setzero_pd(), c41 = _mm256_setzero_pd();
  __m256d c50 = _mm256_setzero_pd(), c51 = _mm256_setzero_pd();
  for (std::size_t p = 0; p < kc; ++p) {
    const __m256d b0 = _mm256_loadu_pd(bp);
    const __m256d b1 = _mm256_loadu_pd(bp + 4);
    __m256d a = _mm256_broadcast_sd(ap + 0);
    c00 = _mm256_fmadd_pd(a, b0, c00);
    c01 = _mm256_fmadd_pd(a, b1, c01);
    a = _mm256_broadcast_sd(ap + 1);
    c10 = _mm256_fmadd_pd(a, b0, c10);
    c11 = _mm256_fmadd_pd(a, b1, c11);
    a = _mm256_broadcast_sd(ap + 2);
    c20 = _mm256_fmadd_pd(a, b0, c20);
    c21 = _mm256_fmadd_pd(a, b1, c21);
    a = _mm256_broadcast_sd(ap + 3);
    c30 = _mm256_fmadd_pd(a, b0, c30);
    c31 = _mm256_fmadd_pd(a, b1, c31);
    a = _mm256_broadcast_sd(ap + 4);
    c40 = _mm256_fmadd_pd(a, b0, c40);
    c41 = _mm256_fmadd_pd(a, b1, c41);
    a = _mm256_broadcast_sd(ap + 5);
    c50 = _mm256_fmadd_pd(a, b0, c50);
    c51 = _mm256_fmadd_pd(a, b1, c51);
    ap += 6;
    bp += 8;
  }
  _mm256_storeu_pd(tile + 0, c00);
  _mm256_storeu_pd(tile + 4, c01);
  _mm256_storeu_pd(tile + 8, c10);
  _mm256_storeu_pd(tile + 12, c11);
  _mm256_storeu_pd(tile + 16, c20);
  _mm256_storeu_pd(tile + 20, c21);
  _mm256_storeu_pd(tile + 24, c30);
  _mm256_storeu_pd(tile + 28, c31);
  _mm256_storeu_pd(tile + 32, c40);
  _mm256_storeu_pd(tile + 36, c41);
  _mm256_storeu_pd(tile + 40, c50);
  _mm256_storeu_pd(tile + 44, c51);
}

// Skinny shapes (a handful of rows or a short inner dimension) are
// bandwidth bound; packing the large operand would double the traffic.

inline __m256 vload(const float* p) { return _mm256_loadu_ps(p); }
inline __m256d vload(const double* p) { return _mm256_loadu_pd(p); }
inline void vstore(float* p, __m256 v) { _mm256_storeu_ps(p, v); }
inline void vstore(double* p, __m256d v) { _mm256_storeu_pd(p, v); }
inline __m256 vbroadcast(float v) { return _mm256_set1_ps(v); }
inline __m256d vbroadcast(double v) { return _mm256_set1_pd(v); }
inline __m256 vzero(float) { return _mm256_setzero_ps(); }
inline __m256d vzero(double) { return _mm256_setzero_pd(); }
inline __m256 vfma(__m256 a, __m256 b, __m256 c) { return _mm256_fmadd_ps(a, b, c); }
inline __m256d vfma(__m256d a, __m256d b, __m256d c) { return _mm256_fmadd_pd(a, b, c); }

inline float hsum(__m256 v) {
  alignas(32) float t[8];
  _mm256_store_ps(t, v);
  return ((t[0] + t[1]) + (t[2] + t[3])) + ((t[4] + t[5]) + (t[6] + t[7]));
}
inline double hsum(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return (t[0] + t[1]) + (t[2] + t[3]);
}

template <typename T>
inline T merge(T acc, T alpha, T beta, T old) {
  return beta == T{0} ? alpha * acc : alpha * acc + beta * old;
}

constexpr std::size_t kSkinny = 16;
constexpr std::size_t kShortK = 16;

// C[m x n] (m <= 16) = A B with B not transposed. Rows of B are streamed
// in order, four at a time, into an accumulator block that stays in L1.
template <typename T>
void gemm_few_rows_bn(Trans ta, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a,
                      std::size_t lda, const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc) {
  using V = decltype(vzero(T{}));
  constexpr std::size_t w = sizeof(V) / sizeof(T);
  constexpr std::size_t chunk = 2048 / sizeof(T);
  alignas(32) T acc[kSkinny * chunk];
  const auto a_at = [&](std::size_t i, std::size_t p) { return ta == Trans::no ? a[i * lda + p] : a[p * lda + i]; };
  for (std::size_t j0 = 0; j0 < n; j0 += chunk) {
    const std::size_t nc = std::min(chunk, n - j0);
    const std::size_t nv = nc / w * w;
    std::fill(acc, acc + m * chunk, T{0});
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
      const T* b0 = b + p * ldb + j0;
      const T* b1 = b0 + ldb;
      const T* b2 = b1 + ldb;
      const T* b3 = b2 + ldb;
      for (std::size_t i = 0; i < m; ++i) {
        const T s0 = a_at(i, p), s1 = a_at(i, p + 1), s2 = a_at(i, p + 2), s3 = a_at(i, p + 3);
        const V a0 = vbroadcast(s0), a1 = vbroadcast(s1), a2 = vbroadcast(s2), a3 = vbroadcast(s3);
        T* row = acc + i * chunk;
        std::size_t j = 0;
        for (; j < nv; j += w) {
          V x = vload(row + j);
          x = vfma(a0, vload(b0 + j), x);
          x = vfma(a1, vload(b1 + j), x);
          x = vfma(a2, vload(b2 + j), x);
          x = vfma(a3, vload(b3 + j), x);
          vstore(row + j, x);
        }
        for (; j < nc; ++j) row[j] = (((row[j] + s0 * b0[j]) + s1 * b1[j]) + s2 * b2[j]) + s3 * b3[j];
      }
    }
    for (; p < k; ++p) {
      const T* b0 = b + p * ldb + j0;
      for (std::size_t i = 0; i < m; ++i) {
        const T s0 = a_at(i, p);
        const V a0 = vbroadcast(s0);
        T* row = acc + i * chunk;
        std::size_t j = 0;
        for (; j < nv; j += w) vstore(row + j, vfma(a0, vload(b0 + j), vload(row + j)));
        for (; j < nc; ++j) row[j] += s0 * b0[j];
      }
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < nc; ++j) c[i * ldc + j0 + j] = merge(acc[i * chunk + j], alpha, beta, c[i * ldc + j0 + j]);
  }
}

// C[M x n] = A B^T for a compile-time row count: dot products along k with
// all M accumulators in registers.
template <std::size_t M, typename T>
void few_rows_bt(std::size_t n, std::size_t k, T alpha, const T* a, std::size_t lda, const T* b, std::size_t ldb,
                 T beta, T* c, std::size_t ldc) {
  using V = decltype(vzero(T{}));
  constexpr std::size_t w = sizeof(V) / sizeof(T);
  const std::size_t kv = k / w * w;
  for (std::size_t j = 0; j < n; ++j) {
    const T* brow = b + j * ldb;
    V acc[M];
    for (std::size_t i = 0; i < M; ++i) acc[i] = vzero(T{});
    for (std::size_t p = 0; p < kv; p += w) {
      const V bv = vload(brow + p);
      for (std::size_t i = 0; i < M; ++i) acc[i] = vfma(vload(a + i * lda + p), bv, acc[i]);
    }
    for (std::size_t i = 0; i < M; ++i) {
      T s = hsum(acc[i]);
      for (std::size_t p = kv; p < k; ++p) s += a[i * lda + p] * brow[p];
      c[i * ldc + j] = merge(s, alpha, beta, c[i * ldc + j]);
    }
  }
}

// Rows are processed in register blocks of at most 8.
template <typename T>
void gemm_few_rows_bt(std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a, std::size_t lda,
                      const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc) {
  for (std::size_t i0 = 0; i0 < m; i0 += 8) {
    const T* ai = a + i0 * lda;
    T* ci = c + i0 * ldc;
    switch (std::min<std::size_t>(8, m - i0)) {
      case 1: few_rows_bt<1>(n, k, alpha, ai, lda, b, ldb, beta, ci, ldc); break;
      case 2: few_rows_bt<2>(n, k, alpha, ai, lda, b, ldb, beta, ci, ldc); break;
      case 3: few_rows_bt<3>(n, k, alpha, ai, lda, b, ldb, beta, ci, ldc); break;
      case 4: few_rows_bt<4>(n, k, alpha, ai, lda, b, ldb, beta, ci, ldc); break;
      case 5: few_rows_bt<5>(n, k, alpha, ai, lda, b, ldb, beta, ci, ldc); break;
      case 6: few_rows_bt<6>(n, k, alpha, ai, lda, b, ldb, beta, ci, ldc); break;
      case 7: few_rows_bt<7>(n, k, alpha, ai, lda, b, ldb, beta, ci, ldc); break;
      default: few_rows_bt<8>(n, k, alpha, ai, lda, b, ldb, beta, ci, ldc); break;
    }
  }
}

// Short inner dimension with B not transposed: each C row is a combination
// of at most 16 rows of B.
template <typename T>
void gemm_short_k(Trans ta, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a, std::size_t lda,
                  const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc) {
  using V = decltype(vzero(T{}));
  constexpr std::size_t w = sizeof(V) / sizeof(T);
  for (std::size_t i = 0; i < m; ++i) {
    V coef[kShortK];
    T coef_s[kShortK];
    for (std::size_t p = 0; p < k; ++p) {
      coef_s[p] = ta == Trans::no ? a[i * lda + p] : a[p * lda + i];
      coef[p] = vbroadcast(coef_s[p]);
    }
    T* crow = c + i * ldc;
    std::size_t j = 0;
    for (; j + w <= n; j += w) {
      V acc = vzero(T{});
      for (std::size_t p = 0; p < k; ++p) acc = vfma(coef[p], vload(b + p * ldb + j), acc);
      alignas(32) T t[w];
      vstore(t, acc);
      for (std::size_t q = 0; q < w; ++q) crow[j + q] = merge(t[q], alpha, beta, crow[j + q]);
    }
    for (; j < n; ++j) {
      T acc{0};
      for (std::size_t p = 0; p < k; ++p) acc += coef_s[p] * b[p * ldb + j];
      crow[j] = merge(acc, alpha, beta, crow[j]);
    }
  }
}

template <typename T>
void gemm_impl(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, T alpha,
               const T* a, std::size_t lda, const T* b, std::size_t ldb, T beta, T* c,
               std::size_t ldc) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) c[i * ldc + j] = beta == T{0} ? T{0} : beta * c[i * ldc + j];
    return;
  }
  if (m <= kSkinny) {
    if (tb == Trans::no)
      gemm_few_rows_bn(ta, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
    else if (ta == Trans::no)
      gemm_few_rows_bt(m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
    else
      goto packed;
    return;
  }
  if (k <= kShortK && tb == Trans::no) {
    gemm_short_k(ta, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
    return;
  }
packed:
  if constexpr (sizeof(T) == 4)
    packed_gemm<6, 16>([](std::size_t kc, const T* ap, const T* bp, T* tile) { micro_kernel(kc, ap, bp, tile); }, ta,
                       tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
  else
    packed_gemm<6, 8>([](std::size_t kc, const T* ap, const T* bp, T* tile) { micro_kernel(kc, ap, bp, tile); }, ta,
                      tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

}  // namespace

template <typename T>
void gemm(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a,
          std::size_t lda, const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc) {
  gemm_impl(ta, tb, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

template <>
void adam_update<float>(std::span<float> param, std::span<const float> grad, std::span<float> m,
                        std::span<float> v, float lr, float beta1, float beta2, float eps,
                        float bc1, float bc2) {
  const std::size_t n = param.size();
  const __m256 vb1 = _mm256_set1_ps(beta1), vb2 = _mm256_set1_ps(beta2);
  const __m256 vomb1 = _mm256_set1_ps(1.0f - beta1), vomb2 = _mm256_set1_ps(1.0f - beta2);
  const __m256 vlr = _mm256_set1_ps(lr), veps = _mm256_set1_ps(eps);
  const __m256 vbc1 = _mm256_set1_ps(bc1), vbc2 = _mm256_set1_ps(bc2);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 g = _mm256_loadu_ps(grad.data() + i);
    const __m256 mi = _mm256_add_ps(_mm256_mul_ps(vb1, _mm256_loadu_ps(m.data() + i)),
                                    _mm256_mul_ps(vomb1, g));
    const __m256 vi = _mm256_add_ps(_mm256_mul_ps(vb2, _mm256_loadu_ps(v.data() + i)),
                                    _mm256_mul_ps(vomb2, _mm256_mul_ps(g, g)));
    _mm256_storeu_ps(m.data() + i, mi);
    _mm256_storeu_ps(v.data() + i, vi);
    const __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(_mm256_div_ps(vi, vbc2)), veps);
    const __m256 step = _mm256_mul_ps(vlr, _mm256_div_ps(_mm256_div_ps(mi, vbc1), denom));
    _mm256_storeu_ps(param.data() + i, _mm256_sub_ps(_mm256_loadu_ps(param.data() + i), step));
  }
  if (i < n)
    scalar::adam_update(param.subspan(i), grad.subspan(i), m.subspan(i), v.subspan(i), lr, beta1,
                        beta2, eps, bc1, bc2);
}

template <>
void adam_update<double>(std::span<double> param, std::span<const double> grad,
                         std::span<double> m, std::span<double> v, double lr, double beta1,
                         double beta2, double eps, double bc1, double bc2) {
  const std::size_t n = param.size();
  const __m256d vb1 = _mm256_set1_pd(beta1), vb2 = _mm256_set1_pd(beta2);
  const __m256d vomb1 = _mm256_set1_pd(1.0 - beta1), vomb2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vlr = _mm256_set1_pd(lr), veps = _mm256_set1_pd(eps);
  const __m256d vbc1 = _mm256_set1_pd(bc1), vbc2 = _mm256_set1_pd(bc2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad.data() + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(vb1, _mm256_loadu_pd(m.data() + i)),
                                     _mm256_mul_pd(vomb1, g));
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(vb2, _mm256_loadu_pd(v.data() + i)),
                                     _mm256_mul_pd(vomb2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m.data() + i, mi);
    _mm256_storeu_pd(v.data() + i, vi);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(_mm256_div_pd(vi, vbc2)), veps);
    const __m256d step = _mm256_mul_pd(vlr, _mm256_div_pd(_mm256_div_pd(mi, vbc1), denom));
    _mm256_storeu_pd(param.data() + i, _mm256_sub_pd(_mm256_loadu_pd(param.data() + i), step));
  }
  if (i < n)
    scalar::adam_update(param.subspan(i), grad.subspan(i), m.subspan(i), v.subspan(i), lr, beta1,
                        beta2, eps, bc1, bc2);
}

template <>
void leaky_relu<float>(std::span<const float> x, std::span<float> y, float alpha) {
  const __m256 va = _mm256_set1_ps(alpha), zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= x.size(); i += 8) {
    const __m256 xv = _mm256_loadu_ps(x.data() + i);
    const __m256 pos = _mm256_cmp_ps(xv, zero, _CMP_GE_OQ);
    _mm256_storeu_ps(y.data() + i, _mm256_blendv_ps(_mm256_mul_ps(va, xv), xv, pos));
  }
  if (i < x.size()) scalar::leaky_relu(x.subspan(i), y.subspan(i), alpha);
}

template <>
void leaky_relu<double>(std::span<const double> x, std::span<double> y, double alpha) {
  const __m256d va = _mm256_set1_pd(alpha), zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    const __m256d xv = _mm256_loadu_pd(x.data() + i);
    const __m256d pos = _mm256_cmp_pd(xv, zero, _CMP_GE_OQ);
    _mm256_storeu_pd(y.data() + i, _mm256_blendv_pd(_mm256_mul_pd(va, xv), xv, pos));
  }
  if (i < x.size()) scalar::leaky_relu(x.subspan(i), y.subspan(i), alpha);
}

template <>
void leaky_relu_backward<float>(std::span<const float> x, std::span<const float> dy,
                                std::span<float> dx, float alpha) {
  const __m256 va = _mm256_set1_ps(alpha), zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= x.size(); i += 8) {
    const __m256 pos = _mm256_cmp_ps(_mm256_loadu_ps(x.data() + i), zero, _CMP_GE_OQ);
    const __m256 g = _mm256_loadu_ps(dy.data() + i);
    _mm256_storeu_ps(dx.data() + i, _mm256_blendv_ps(_mm256_mul_ps(va, g), g, pos));
  }
  if (i < x.size())
    scalar::leaky_relu_backward(x.subspan(i), dy.subspan(i), dx.subspan(i), alpha);
}

template <>
void leaky_relu_backward<double>(std::span<const double> x, std::span<const double> dy,
                                 std::span<double> dx, double alpha) {
  const __m256d va = _mm256_set1_pd(alpha), zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4) {
    const __m256d pos = _mm256_cmp_pd(_mm256_loadu_pd(x.data() + i), zero, _CMP_GE_OQ);
    const __m256d g = _mm256_loadu_pd(dy.data() + i);
    _mm256_storeu_pd(dx.data() + i, _mm256_blendv_pd(_mm256_mul_pd(va, g), g, pos));
  }
  if (i < x.size())
    scalar::leaky_relu_backward(x.subspan(i), dy.subspan(i), dx.subspan(i), alpha);
}

// x * 0 is 0 for finite x and NaN for NaN or infinity.
template <>
bool all_finite<float>(std::span<const float> x) {
  const __m256 zero = _mm256_setzero_ps();
  __m256 ok = _mm256_castsi256_ps(_mm256_set1_epi32(-1));
  std::size_t i = 0;
  for (; i + 8 <= x.size(); i += 8)
    ok = _mm256_and_ps(ok, _mm256_cmp_ps(_mm256_mul_ps(_mm256_loadu_ps(x.data() + i), zero), zero, _CMP_EQ_OQ));
  return _mm256_movemask_ps(ok) == 0xff && scalar::all_finite(x.subspan(i));
}

template <>
bool all_finite<double>(std::span<const double> x) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d ok = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
  std::size_t i = 0;
  for (; i + 4 <= x.size(); i += 4)
    ok = _mm256_and_pd(ok, _mm256_cmp_pd(_mm256_mul_pd(_mm256_loadu_pd(x.data() + i), zero), zero, _CMP_EQ_OQ));
  return _mm256_movemask_pd(ok) == 0xf && scalar::all_finite(x.subspan(i));
}

template void gemm<float>(Trans, Trans, std::size_t, std::size_t, std::size_t, float,
                          const float*, std::size_t, const float*, std::size_t, float, float*,
                          std::size_t);
template void gemm<double>(Trans, Trans, std::size_t, std::size_t, std::size_t, double,
                           const double*, std::size_t, const double*, std::size_t, double,
                           double*, std::size_t);

}  // namespace foldgan::kernels::avx2
