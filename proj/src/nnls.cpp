#include "gptlab/nnls.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "gptlab/config.hpp"

namespace gptlab {

NnlsResult solve_nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                      const NnlsOptions& options) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m) throw InputError("solve_nnls: dimension mismatch");

  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(n);
  out.residual = b;
  out.residual_norm = b.norm();
  out.dual = n > 0 ? Eigen::VectorXd(a.transpose() * b) : Eigen::VectorXd();
  if (n == 0) return out;

  const std::size_t cap = options.max_iterations != 0
                              ? options.max_iterations
                              : 3 * static_cast<std::size_t>(n) + 64;

  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  // Columns rejected since the last change of x; re-adding them would loop.
  std::vector<bool> blocked(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> pset;
  Eigen::VectorXd& x = out.x;

  auto solve_passive = [&](Eigen::VectorXd& z) {
    Eigen::MatrixXd sub(m, static_cast<Eigen::Index>(pset.size()));
    for (std::size_t k = 0; k < pset.size(); ++k)
      sub.col(static_cast<Eigen::Index>(k)) = a.col(pset[k]);
    z = sub.colPivHouseholderQr().solve(b);
  };

  std::size_t iterations = 0;
  for (;;) {
    if (out.residual_norm <= options.target_residual) break;
    const double dual_tol =
        std::max(options.dual_abs, options.dual_rel * out.residual_norm);
    Eigen::Index best = -1;
    double best_w = dual_tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[static_cast<std::size_t>(j)] ||
          blocked[static_cast<std::size_t>(j)])
        continue;
      if (out.dual(j) > best_w) {
        best_w = out.dual(j);
        best = j;
      }
    }
    if (best < 0) break;

    if (++iterations > cap)
      throw SolverError("nnls: iteration cap " + std::to_string(cap) +
                        " exceeded (" + std::to_string(m) + " x " +
                        std::to_string(n) + ")");

    passive[static_cast<std::size_t>(best)] = true;
    pset.push_back(best);

    Eigen::VectorXd z;
    bool first = true;
    bool moved = false;
    for (;;) {
      solve_passive(z);
      bool all_positive = true;
      for (Eigen::Index k = 0; k < z.size(); ++k)
        if (!(z(k) > 0.0)) {
          all_positive = false;
          break;
        }
      if (all_positive) {
        for (std::size_t k = 0; k < pset.size(); ++k)
          x(pset[k]) = z(static_cast<Eigen::Index>(k));
        moved = true;
        break;
      }
      if (first && !(z(static_cast<Eigen::Index>(pset.size() - 1)) > 0.0)) {
        // The entering column cannot carry positive weight: rounding made its
        // dual look positive. Reject it until x changes.
        passive[static_cast<std::size_t>(best)] = false;
        pset.pop_back();
        blocked[static_cast<std::size_t>(best)] = true;
        break;
      }
      first = false;
      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < pset.size(); ++k) {
        const double zk = z(static_cast<Eigen::Index>(k));
        if (!(zk > 0.0)) {
          const double xk = x(pset[k]);
          alpha = std::min(alpha, xk / (xk - zk));
        }
      }
      for (std::size_t k = 0; k < pset.size(); ++k)
        x(pset[k]) += alpha * (z(static_cast<Eigen::Index>(k)) - x(pset[k]));
      moved = true;
      std::vector<Eigen::Index> keep;
      for (Eigen::Index j : pset) {
        if (x(j) <= 1e-15) {
          x(j) = 0.0;
          passive[static_cast<std::size_t>(j)] = false;
        } else {
          keep.push_back(j);
        }
      }
      pset.swap(keep);
      if (pset.empty()) break;
      if (++iterations > cap)
        throw SolverError("nnls: iteration cap " + std::to_string(cap) +
                          " exceeded in inner loop");
    }
    if (moved) std::fill(blocked.begin(), blocked.end(), false);
    out.residual = b - a * x;
    out.residual_norm = out.residual.norm();
    out.dual = a.transpose() * out.residual;
  }
  out.iterations = iterations;
  return out;
}

}  // namespace gptlab
