#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "foldgan/kernels/kernels.hpp"
#include "foldgan/nn/network.hpp"
#include "helpers.hpp"

namespace k = foldgan::kernels;
using foldgan::Rng;

namespace {

std::vector<k::Isa> simd_variants() {
  std::vector<k::Isa> out;
  if (k::detected_isa() != k::Isa::scalar) out.push_back(k::Isa::avx2);
  if (k::detected_isa() == k::Isa::avx512) out.push_back(k::Isa::avx512);
  return out;
}

struct IsaGuard {
  k::Isa saved = k::active_isa();
  ~IsaGuard() { k::set_active_isa(saved); }
};

struct GemmCase {
  k::Trans ta, tb;
  std::size_t m, n, k, lda, ldb, ldc;
  double alpha, beta;
};

template <typename T>
struct GemmData {
  std::vector<T> a, b, c0;
};

template <typename T>
GemmData<T> make_data(const GemmCase& g, Rng& rng) {
  const std::size_t a_rows = g.ta == k::Trans::no ? g.m : g.k;
  const std::size_t b_rows = g.tb == k::Trans::no ? g.k : g.n;
  GemmData<T> d;
  d.a.resize(a_rows * g.lda);
  d.b.resize(b_rows * g.ldb);
  d.c0.resize(g.m * g.ldc);
  for (auto& v : d.a) v = static_cast<T>(rng.normal());
  for (auto& v : d.b) v = static_cast<T>(rng.normal());
  for (auto& v : d.c0) v = g.beta == 0.0 ? std::numeric_limits<T>::quiet_NaN() : static_cast<T>(rng.normal());
  return d;
}

// Independent oracle: naive triple loop in long double with an error bound.
template <typename T>
void oracle(const GemmCase& g, const GemmData<T>& d, std::vector<long double>& ref, std::vector<long double>& bound) {
  ref.assign(g.m * g.n, 0.0L);
  bound.assign(g.m * g.n, 0.0L);
  for (std::size_t i = 0; i < g.m; ++i)
    for (std::size_t j = 0; j < g.n; ++j) {
      long double acc = 0.0L, mag = 0.0L;
      for (std::size_t p = 0; p < g.k; ++p) {
        const long double a = g.ta == k::Trans::no ? d.a[i * g.lda + p] : d.a[p * g.lda + i];
        const long double b = g.tb == k::Trans::no ? d.b[p * g.ldb + j] : d.b[j * g.ldb + p];
        acc += a * b;
        mag += std::fabs(a * b);
      }
      long double c = g.alpha * acc;
      long double cmag = std::fabs(g.alpha) * mag;
      if (g.beta != 0.0) {
        c += g.beta * static_cast<long double>(d.c0[i * g.ldc + j]);
        cmag += std::fabs(g.beta * static_cast<long double>(d.c0[i * g.ldc + j]));
      }
      ref[i * g.n + j] = c;
      bound[i * g.n + j] = 4.0L * static_cast<long double>(g.k + 2) * std::numeric_limits<T>::epsilon() * cmag +
                           std::numeric_limits<T>::min();
    }
}

template <typename T>
std::vector<T> run(const GemmCase& g, const GemmData<T>& d, k::Isa isa) {
  std::vector<T> c = d.c0;
  const auto fn = isa == k::Isa::scalar ? &k::scalar::gemm<T> : isa == k::Isa::avx2 ? &k::avx2::gemm<T> : &k::avx512::gemm<T>;
  fn(g.ta, g.tb, g.m, g.n, g.k, static_cast<T>(g.alpha), d.a.data(), g.lda, d.b.data(), g.ldb, static_cast<T>(g.beta),
     c.data(), g.ldc);
  return c;
}

std::vector<GemmCase> gemm_cases() {
  std::vector<GemmCase> cases;
  Rng rng(2024);
  const std::size_t dims[][3] = {{1, 1, 1},   {3, 5, 7},    {8, 1024, 96}, {12, 300, 800}, {16, 33, 17},
                                 {17, 40, 5}, {64, 768, 12}, {100, 70, 300}, {6, 16, 256},  {13, 97, 1},
                                 {200, 3, 50}, {97, 129, 33}, {1, 64, 4},    {31, 8, 16}};
  for (const auto& d : dims)
    for (int t = 0; t < 4; ++t)
      for (const double beta : {0.0, 1.0, -0.5}) {
        GemmCase g{};
        g.ta = (t & 1) ? k::Trans::yes : k::Trans::no;
        g.tb = (t & 2) ? k::Trans::yes : k::Trans::no;
        g.m = d[0];
        g.n = d[1];
        g.k = d[2];
        const std::size_t pad = testing::uniform_int(rng, 0, 3);
        g.lda = (g.ta == k::Trans::no ? g.k : g.m) + pad;
        g.ldb = (g.tb == k::Trans::no ? g.n : g.k) + pad;
        g.ldc = g.n + pad;
        g.alpha = beta == -0.5 ? 0.75 : 1.0;
        g.beta = beta;
        cases.push_back(g);
      }
  return cases;
}

template <typename T>
void check_gemm_variant(k::Isa isa) {
  Rng rng(7);
  for (const GemmCase& g : gemm_cases()) {
    const GemmData<T> d = make_data<T>(g, rng);
    std::vector<long double> ref, bound;
    oracle(g, d, ref, bound);
    const std::vector<T> c = run(g, d, isa);
    bool ok = true;
    for (std::size_t i = 0; i < g.m && ok; ++i)
      for (std::size_t j = 0; j < g.n && ok; ++j) ok = std::fabs(c[i * g.ldc + j] - ref[i * g.n + j]) <= bound[i * g.n + j];
    INFO("isa " << k::isa_name(isa) << " m=" << g.m << " n=" << g.n << " k=" << g.k << " ta=" << int(g.ta)
                << " tb=" << int(g.tb) << " beta=" << g.beta);
    CHECK(ok);
    // Padding columns of C are never touched.
    for (std::size_t i = 0; i < g.m; ++i)
      for (std::size_t j = g.n; j < g.ldc; ++j) {
        const T before = d.c0[i * g.ldc + j], after = c[i * g.ldc + j];
        CHECK(((std::isnan(before) && std::isnan(after)) || before == after));
      }
  }
}

}  // namespace

TEST_CASE("scalar gemm matches the naive oracle") {
  check_gemm_variant<float>(k::Isa::scalar);
  check_gemm_variant<double>(k::Isa::scalar);
}

TEST_CASE("SIMD gemm variants match the naive oracle") {
  for (const k::Isa isa : simd_variants()) {
    check_gemm_variant<float>(isa);
    check_gemm_variant<double>(isa);
  }
}

TEST_CASE("gemm with k == 0 scales C by beta") {
  for (const k::Isa isa : simd_variants()) {
    std::vector<float> c = {1, 2, 3, 4};
    const auto fn = isa == k::Isa::avx2 ? &k::avx2::gemm<float> : &k::avx512::gemm<float>;
    fn(k::Trans::no, k::Trans::no, 2, 2, 0, 1.0f, nullptr, 1, nullptr, 2, 0.5f, c.data(), 2);
    CHECK(c == std::vector<float>{0.5f, 1.0f, 1.5f, 2.0f});
  }
  std::vector<double> c = {1, 2};
  k::scalar::gemm<double>(k::Trans::no, k::Trans::no, 1, 2, 0, 1.0, nullptr, 1, nullptr, 2, 0.0, c.data(), 2);
  CHECK(c == std::vector<double>{0.0, 0.0});
}

TEST_CASE("elementwise kernels agree with the scalar reference") {
  Rng rng(3);
  for (const k::Isa isa : simd_variants()) {
    for (const std::size_t n : {1u, 7u, 8u, 9u, 31u, 64u, 1001u}) {
      std::vector<float> x(n), dy(n), y0(n), y1(n), dx0(n), dx1(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<float>(rng.normal());
        dy[i] = static_cast<float>(rng.normal());
      }
      x[0] = 0.0f;
      k::scalar::leaky_relu<float>(x, y0, 0.2f);
      k::avx2::leaky_relu<float>(x, y1, 0.2f);
      CHECK(y0 == y1);
      k::scalar::leaky_relu_backward<float>(x, dy, dx0, 0.2f);
      k::avx2::leaky_relu_backward<float>(x, dy, dx1, 0.2f);
      CHECK(dx0 == dx1);

      std::vector<double> p0(n), g(n), m0(n), v0(n);
      for (std::size_t i = 0; i < n; ++i) {
        p0[i] = rng.normal();
        g[i] = rng.normal();
        m0[i] = 0.1 * rng.normal();
        v0[i] = rng.uniform();
      }
      auto p1 = p0, m1 = m0, v1 = v0;
      k::scalar::adam_update<double>(p0, g, m0, v0, 1e-3, 0.5, 0.9, 1e-8, 0.5, 0.1);
      k::avx2::adam_update<double>(p1, g, m1, v1, 1e-3, 0.5, 0.9, 1e-8, 0.5, 0.1);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(p1[i] == doctest::Approx(p0[i]).epsilon(1e-12));
        CHECK(m1[i] == doctest::Approx(m0[i]).epsilon(1e-12));
        CHECK(v1[i] == doctest::Approx(v0[i]).epsilon(1e-12));
      }
    }
    (void)isa;
  }
}

TEST_CASE("all_finite detects NaN and infinity at every position") {
  for (const std::size_t n : {1u, 5u, 8u, 16u, 17u, 100u}) {
    for (std::size_t pos = 0; pos < n; ++pos) {
      for (const double bad : {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(),
                               -std::numeric_limits<double>::infinity()}) {
        std::vector<float> f(n, 1.5f);
        std::vector<double> d(n, -2.0);
        f[pos] = static_cast<float>(bad);
        d[pos] = bad;
        CHECK_FALSE(k::scalar::all_finite<float>(f));
        CHECK_FALSE(k::scalar::all_finite<double>(d));
        if (k::detected_isa() != k::Isa::scalar) {
          CHECK_FALSE(k::avx2::all_finite<float>(f));
          CHECK_FALSE(k::avx2::all_finite<double>(d));
        }
      }
    }
    std::vector<float> ok(n, std::numeric_limits<float>::max());
    CHECK(k::scalar::all_finite<float>(ok));
    if (k::detected_isa() != k::Isa::scalar) CHECK(k::avx2::all_finite<float>(ok));
  }
}

TEST_CASE("active isa can be lowered and is clamped to the CPU") {
  IsaGuard guard;
  k::set_active_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  k::set_active_isa(k::Isa::avx512);
  CHECK(static_cast<int>(k::active_isa()) <= static_cast<int>(k::detected_isa()));
  CHECK(k::isa_name(k::Isa::scalar) == "scalar");
  CHECK(k::isa_name(k::Isa::avx2) == "avx2");
  CHECK(k::isa_name(k::Isa::avx512) == "avx512");
}

TEST_CASE("a whole network gives matching outputs under every kernel set") {
  using foldgan::nn::LayerSpec;
  const std::vector<LayerSpec> specs = {LayerSpec::conv2d(8),  LayerSpec::leaky_relu(), LayerSpec::conv2d(16),
                                        LayerSpec::leaky_relu(), LayerSpec::flatten(),    LayerSpec::dense(32),
                                        LayerSpec::leaky_relu(), LayerSpec::dense(1)};
  foldgan::nn::Network<float> net("n", {1, 16, 24}, specs, 11);
  const auto x = testing::random_tensor<float>({5, 1, 16, 24}, 12);
  IsaGuard guard;
  k::set_active_isa(k::Isa::scalar);
  const auto ref = net.forward(x, foldgan::nn::Mode::infer);
  for (const k::Isa isa : simd_variants()) {
    k::set_active_isa(isa);
    const auto y = net.forward(x, foldgan::nn::Mode::infer);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(ref[i]).epsilon(1e-4));
  }
}
