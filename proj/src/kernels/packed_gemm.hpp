#pragma once

// Cache-blocked GEMM driver shared by the SIMD translation units. Each unit
// includes this header and supplies its own register micro-kernel; the
// anonymous namespace keeps the instantiations (compiled with different
// target flags) private to that unit.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "foldgan/kernels/kernels.hpp"

namespace foldgan::kernels {
namespace {

constexpr std::size_t kKc = 256;
constexpr std::size_t kMc = 96;
constexpr std::size_t kNc = 1024;

template <std::size_t MR, typename T>
void pack_a(Trans ta, const T* a, std::size_t lda, std::size_t i0, std::size_t mc, std::size_t p0, std::size_t kc,
            T* out) {
  for (std::size_t ir = 0; ir < mc; ir += MR) {
    const std::size_t rows = std::min(MR, mc - ir);
    T* panel = out + ir * kc;
    for (std::size_t r = 0; r < MR; ++r) {
      if (r >= rows) {
        for (std::size_t p = 0; p < kc; ++p) panel[p * MR + r] = T{0};
        continue;
      }
      const std::size_t i = i0 + ir + r;
      if (ta == Trans::no) {
        const T* src = a + i * lda + p0;
        for (std::size_t p = 0; p < kc; ++p) panel[p * MR + r] = src[p];
      } else {
        for (std::size_t p = 0; p < kc; ++p) panel[p * MR + r] = a[(p0 + p) * lda + i];
      }
    }
  }
}

template <std::size_t NR, typename T>
void pack_b(Trans tb, const T* b, std::size_t ldb, std::size_t p0, std::size_t kc, std::size_t j0, std::size_t nc,
            T* out) {
  for (std::size_t jr = 0; jr < nc; jr += NR) {
    const std::size_t cols = std::min(NR, nc - jr);
    T* panel = out + jr * kc;
    if (tb == Trans::no) {
      for (std::size_t p = 0; p < kc; ++p) {
        const T* src = b + (p0 + p) * ldb + j0 + jr;
        T* dst = panel + p * NR;
        std::size_t c = 0;
        for (; c < cols; ++c) dst[c] = src[c];
        for (; c < NR; ++c) dst[c] = T{0};
      }
    } else {
      for (std::size_t c = 0; c < NR; ++c) {
        if (c >= cols) {
          for (std::size_t p = 0; p < kc; ++p) panel[p * NR + c] = T{0};
          continue;
        }
        const T* src = b + (j0 + jr + c) * ldb + p0;
        for (std::size_t p = 0; p < kc; ++p) panel[p * NR + c] = src[p];
      }
    }
  }
}

template <std::size_t NR, typename T>
void merge_tile(const T* tile, std::size_t rows, std::size_t cols, T alpha, T beta, T* c, std::size_t ldc) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T* t = tile + r * NR;
    T* crow = c + r * ldc;
    if (beta == T{0}) {
      for (std::size_t j = 0; j < cols; ++j) crow[j] = alpha * t[j];
    } else if (beta == T{1} && alpha == T{1}) {
      for (std::size_t j = 0; j < cols; ++j) crow[j] += t[j];
    } else {
      for (std::size_t j = 0; j < cols; ++j) crow[j] = alpha * t[j] + beta * crow[j];
    }
  }
}

template <typename T>
struct PackBuffers {
  std::vector<T> a;
  std::vector<T> b;
};

/// C = alpha op(A) op(B) + beta C with an MR x NR micro-kernel
/// `micro(kc, a_panel, b_panel, tile)` that writes the full tile.
template <std::size_t MR, std::size_t NR, typename T, typename Micro>
void packed_gemm(Micro micro, Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, T alpha, const T* a,
                 std::size_t lda, const T* b, std::size_t ldb, T beta, T* c, std::size_t ldc) {
  thread_local PackBuffers<T> ws;
  const std::size_t kc_max = std::min(k, kKc);
  const std::size_t mc_max = std::min(kMc / MR * MR, (m + MR - 1) / MR * MR);
  const std::size_t nc_max = std::min(kNc, (n + NR - 1) / NR * NR);
  const std::size_t mc_step = kMc / MR * MR;
  ws.a.resize(kc_max * mc_max);
  ws.b.resize(kc_max * nc_max);
  alignas(64) T tile[MR * NR];

  for (std::size_t jc = 0; jc < n; jc += kNc) {
    const std::size_t nc = std::min(kNc, n - jc);
    for (std::size_t pc = 0; pc < k; pc += kKc) {
      const std::size_t kc = std::min(kKc, k - pc);
      const T beta_eff = pc == 0 ? beta : T{1};
      pack_b<NR>(tb, b, ldb, pc, kc, jc, nc, ws.b.data());
      for (std::size_t ic = 0; ic < m; ic += mc_step) {
        const std::size_t mc = std::min(mc_step, m - ic);
        pack_a<MR>(ta, a, lda, ic, mc, pc, kc, ws.a.data());
        for (std::size_t jr = 0; jr < nc; jr += NR) {
          const std::size_t cols = std::min(NR, nc - jr);
          for (std::size_t ir = 0; ir < mc; ir += MR) {
            const std::size_t rows = std::min(MR, mc - ir);
            micro(kc, ws.a.data() + ir * kc, ws.b.data() + jr * kc, tile);
            merge_tile<NR>(tile, rows, cols, alpha, beta_eff, c + (ic + ir) * ldc + jc + jr, ldc);
          }
        }
      }
    }
  }
}

}  // namespace
}  // namespace foldgan::kernels
