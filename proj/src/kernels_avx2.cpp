#include "gptlab/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define GPTLAB_HAVE_AVX2_TU 1
#include <immintrin.h>
#else
#define GPTLAB_HAVE_AVX2_TU 0
#endif

namespace gptlab::kernels {

#if GPTLAB_HAVE_AVX2_TU
namespace {

#define GPTLAB_AVX2 __attribute__((target("avx2,fma")))

GPTLAB_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

GPTLAB_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

GPTLAB_AVX2 void axpy_avx2(double alpha, const double* x, double* y,
                           std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Row i of C accumulates broadcast(A[i,p]) * B[p,:]; columns are vectorized.
GPTLAB_AVX2 void gemm_avx2(std::size_t m, std::size_t k, std::size_t n,
                           const double* a, const double* b, double* c) {
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      if (aip == 0.0) continue;
      const __m256d va = _mm256_set1_pd(aip);
      const double* bp = b + p * n;
      std::size_t j = 0;
      for (; j < n4; j += 4) {
        _mm256_storeu_pd(ci + j, _mm256_fmadd_pd(va, _mm256_loadu_pd(bp + j),
                                                 _mm256_loadu_pd(ci + j)));
      }
      for (; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

GPTLAB_AVX2 void gemm_tn_avx2(std::size_t m, std::size_t k, std::size_t n,
                              const double* a, const double* b, double* c) {
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < m * n; ++i) c[i] = 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    const double* ap = a + p * m;
    const double* bp = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double api = ap[i];
      if (api == 0.0) continue;
      const __m256d va = _mm256_set1_pd(api);
      double* ci = c + i * n;
      std::size_t j = 0;
      for (; j < n4; j += 4) {
        _mm256_storeu_pd(ci + j, _mm256_fmadd_pd(va, _mm256_loadu_pd(bp + j),
                                                 _mm256_loadu_pd(ci + j)));
      }
      for (; j < n; ++j) ci[j] += api * bp[j];
    }
  }
}

#undef GPTLAB_AVX2

}  // namespace

const KernelTable* avx2() {
  static const KernelTable table{"avx2", dot_avx2, axpy_avx2, gemm_avx2,
                                 gemm_tn_avx2};
  return &table;
}

bool avx2_supported() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

#else

const KernelTable* avx2() { return nullptr; }
bool avx2_supported() { return false; }

#endif

}  // namespace gptlab::kernels
