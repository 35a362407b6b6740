#pragma once

// Dense double-precision kernels behind every coefficient-space operation.
//
// Two implementations exist: a portable scalar reference and an AVX2/FMA
// variant. The active table is chosen once at first use from CPUID; setting
// GPTLAB_KERNELS=scalar in the environment forces the reference path.

#include <cstddef>
#include <string_view>

namespace gptlab::kernels {

struct KernelTable {
  std::string_view name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // C (m x n) = A (m x k) * B (k x n), all row-major and densely packed.
  void (*gemm)(std::size_t m, std::size_t k, std::size_t n, const double* a,
               const double* b, double* c);
  // C (m x n) = A^T * B for A (k x m), B (k x n), row-major.
  void (*gemm_tn)(std::size_t m, std::size_t k, std::size_t n,
                  const double* a, const double* b, double* c);
};

const KernelTable& scalar();
// Returns nullptr when the binary was built without AVX2 support.
const KernelTable* avx2();
bool avx2_supported();

// The table selected for this process.
const KernelTable& active();

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void gemm(std::size_t m, std::size_t k, std::size_t n, const double* a,
                 const double* b, double* c) {
  active().gemm(m, k, n, a, b, c);
}
inline void gemm_tn(std::size_t m, std::size_t k, std::size_t n,
                    const double* a, const double* b, double* c) {
  active().gemm_tn(m, k, n, a, b, c);
}

}  // namespace gptlab::kernels
