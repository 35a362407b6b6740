#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "gptlab/kernels.hpp"
#include "helpers.hpp"

using namespace gptlab;

namespace {

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(a[i]));
  }
  return num / den;
}

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  std::mt19937_64 rng(11);
  const auto& k = kernels::scalar();
  const std::size_t m = 5, kk = 7, n = 3;
  const auto a = testutil::random_vector(m * kk, rng);
  const auto b = testutil::random_vector(kk * n, rng);
  std::vector<double> c(m * n);
  k.gemm(m, kk, n, a.data(), b.data(), c.data());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < kk; ++p) s += a[i * kk + p] * b[p * n + j];
      CHECK(c[i * n + j] == doctest::Approx(s).epsilon(1e-14));
    }
  // A^T B with A stored k x m
  const auto at = testutil::random_vector(kk * m, rng);
  k.gemm_tn(m, kk, n, at.data(), b.data(), c.data());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < kk; ++p) s += at[p * m + i] * b[p * n + j];
      CHECK(c[i * n + j] == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const kernels::KernelTable* v = kernels::avx2();
  if (v == nullptr || !kernels::avx2_supported()) {
    MESSAGE("AVX2 unavailable; equivalence not exercised");
    return;
  }
  const auto& s = kernels::scalar();
  std::mt19937_64 rng(12);
  // sizes straddle the vector width and the unrolled block
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 33u, 81u, 257u}) {
    const auto a = testutil::random_vector(n, rng);
    const auto b = testutil::random_vector(n, rng);
    CHECK(v->dot(a.data(), b.data(), n) ==
          doctest::Approx(s.dot(a.data(), b.data(), n)).epsilon(1e-12));
    auto y1 = b, y2 = b;
    s.axpy(0.37, a.data(), y1.data(), n);
    v->axpy(0.37, a.data(), y2.data(), n);
    CHECK(rel_diff(y1, y2) <= 1e-14);
  }
  for (auto [m, k, n] : {std::array<std::size_t, 3>{1, 1, 1}, {3, 5, 7}, {16, 16, 16},
                         {81, 81, 9}, {9, 81, 130}, {17, 3, 33}, {52, 16, 52}}) {
    const auto a = testutil::random_vector(m * k, rng);
    const auto b = testutil::random_vector(k * n, rng);
    std::vector<double> c1(m * n), c2(m * n);
    s.gemm(m, k, n, a.data(), b.data(), c1.data());
    v->gemm(m, k, n, a.data(), b.data(), c2.data());
    CHECK(rel_diff(c1, c2) <= 1e-12);
    const auto at = testutil::random_vector(k * m, rng);
    s.gemm_tn(m, k, n, at.data(), b.data(), c1.data());
    v->gemm_tn(m, k, n, at.data(), b.data(), c2.data());
    CHECK(rel_diff(c1, c2) <= 1e-12);
  }
}

TEST_CASE("active table is one of the two") {
  const auto& a = kernels::active();
  CHECK((a.name == kernels::scalar().name ||
         (kernels::avx2() != nullptr && a.name == kernels::avx2()->name)));
}
