#pragma once

// Lawson–Hanson active-set solver for min ||A x - b|| subject to x >= 0.

#include <cstddef>

#include <Eigen/Dense>

namespace gptlab {

struct NnlsOptions {
  // Stop once the residual norm drops to this value (x is feasible at every
  // outer iteration, so any such x is acceptable to callers that only need a
  // residual bound).
  double target_residual = 0.0;
  // Optimality: stop when max_j (A^T r)_j <= max(dual_abs, dual_rel * ||r||).
  double dual_abs = 1e-14;
  double dual_rel = 0.0;
  // 0 selects 3 * n + 64.
  std::size_t max_iterations = 0;
};

struct NnlsResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;  // b - A x
  double residual_norm = 0.0;
  Eigen::VectorXd dual;  // A^T residual
  std::size_t iterations = 0;
};

// Throws SolverError when the iteration budget is exhausted.
NnlsResult solve_nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                      const NnlsOptions& options = {});

}  // namespace gptlab
