#include "gptlab/matrix.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "gptlab/config.hpp"

namespace gptlab::qmat {

using cd = std::complex<double>;

Mat pauli(int mu) {
  Mat m = Mat::Zero(2, 2);
  switch (mu) {
    case 0:
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case 1:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case 2:
      m(0, 1) = cd(0, -1);
      m(1, 0) = cd(0, 1);
      break;
    case 3:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    default:
      throw InputError("pauli index must be 0..3");
  }
  return m;
}

Mat rotation(int power) {
  const double a = std::numbers::pi / 8.0 * power;
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = std::polar(1.0, -a);
  m(1, 1) = std::polar(1.0, a);
  return m;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Mat dagger(const Mat& m) { return m.adjoint(); }

Mat conjugate(const Mat& u, const Mat& m) { return u * m * u.adjoint(); }

Mat phi_plus() {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(0) = 1.0 / std::sqrt(2.0);
  v(3) = 1.0 / std::sqrt(2.0);
  return v * v.adjoint();
}

Mat bloch_projector(double r, double x, double y, double z) {
  return 0.5 * (pauli(0) + r * (x * pauli(1) + y * pauli(2) + z * pauli(3)));
}

Mat partial_trace(const Mat& m, int n_qubits, const std::vector<int>& traced) {
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (m.rows() != dim || m.cols() != dim)
    throw InputError("partial_trace: matrix size does not match qubit count");
  unsigned traced_mask = 0;
  for (int q : traced) {
    if (q < 0 || q >= n_qubits) throw InputError("partial_trace: bad qubit");
    traced_mask |= 1u << (n_qubits - 1 - q);
  }
  const int kept = n_qubits - static_cast<int>(traced.size());
  const auto compress = [&](unsigned idx) {
    unsigned out = 0;
    for (int b = n_qubits - 1; b >= 0; --b) {
      if (traced_mask & (1u << b)) continue;
      out = (out << 1) | ((idx >> b) & 1u);
    }
    return static_cast<Eigen::Index>(out);
  };
  Mat out = Mat::Zero(Eigen::Index{1} << kept, Eigen::Index{1} << kept);
  for (unsigned i = 0; i < static_cast<unsigned>(dim); ++i)
    for (unsigned j = 0; j < static_cast<unsigned>(dim); ++j)
      if ((i & traced_mask) == (j & traced_mask))
        out(compress(i), compress(j)) += m(i, j);
  return out;
}

namespace {

int qubit_count(Eigen::Index dim) {
  int k = 0;
  while ((Eigen::Index{1} << k) < dim) ++k;
  if ((Eigen::Index{1} << k) != dim)
    throw InputError("matrix dimension is not a power of two");
  return k;
}

Mat pauli_string(std::size_t flat, int k) {
  Mat m = Mat::Identity(1, 1);
  for (int s = k - 1; s >= 0; --s) {
    const int mu = static_cast<int>((flat >> (2 * s)) & 3u);
    m = kron(m, pauli(mu));
  }
  return m;
}

}  // namespace

CoeffTensor pauli_coeffs(const Mat& m, Side side, double herm_tol) {
  if (m.rows() != m.cols()) throw InputError("pauli_coeffs: matrix not square");
  const int k = qubit_count(m.rows());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
    throw InputError("pauli_coeffs: matrix is not Hermitian");
  const std::size_t n = std::size_t{1} << (2 * k);
  std::vector<double> c(n);
  const double norm = std::ldexp(1.0, -k);
  for (std::size_t f = 0; f < n; ++f) {
    const Mat p = pauli_string(f, k);
    // tr(m p) = sum_ij m_ij p_ji
    c[f] = (m.cwiseProduct(p.transpose())).sum().real() * norm;
  }
  return CoeffTensor(pauli_qubit_kind(), k, std::move(c), side);
}

Mat reconstruct(const CoeffTensor& x) {
  if (!same_kind(x.kind_ptr(), pauli_qubit_kind()))
    throw InputError("reconstruct: tensor is not over the Pauli kind");
  const int k = x.n_slots();
  Mat m = Mat::Zero(Eigen::Index{1} << k, Eigen::Index{1} << k);
  for (std::size_t f = 0; f < x.size(); ++f)
    if (x[f] != 0.0) m += x[f] * pauli_string(f, k);
  return m;
}

Mat swap_matrix(const Mat& rho, const Mat& e, const Mat& sigma) {
  const Mat id = Mat::Identity(2, 2);
  if (rho.rows() != 4 || e.rows() != 4 || sigma.rows() != 4)
    throw InputError("swap_matrix: inputs must be two-qubit operators");
  const Mat big = kron(rho, sigma) * kron(kron(id, e), id);
  return partial_trace(big, 4, {1, 2});
}

}  // namespace gptlab::qmat
