#pragma once

// Complex matrices on k qubits, used to build Pauli-basis models and to
// cross-check coefficient arithmetic against explicit partial traces.

#include <vector>

#include <Eigen/Dense>

#include "gptlab/tensor.hpp"

namespace gptlab::qmat {

using Mat = Eigen::MatrixXcd;

// sigma_0 = 1, sigma_1 = X, sigma_2 = Y, sigma_3 = Z.
Mat pauli(int mu);
// exp(-i (pi/8) sigma_3)^power; power may be negative.
Mat rotation(int power);
Mat kron(const Mat& a, const Mat& b);
Mat dagger(const Mat& m);
// u m u^dagger.
Mat conjugate(const Mat& u, const Mat& m);
// |Phi+><Phi+| with |Phi+> = (|00> + |11>) / sqrt(2).
Mat phi_plus();
// Projector onto the Bloch vector v scaled by r: (1 + r v.sigma) / 2.
Mat bloch_projector(double r, double x, double y, double z);

// Traces out the listed qubits (qubit 0 is the most significant factor).
Mat partial_trace(const Mat& m, int n_qubits, const std::vector<int>& traced);

// c_{mu...} = tr(m sigma_{mu...}) / 2^k. Throws when m is not Hermitian
// within herm_tol.
CoeffTensor pauli_coeffs(const Mat& m, Side side, double herm_tol = 1e-12);
Mat reconstruct(const CoeffTensor& x);

// tr_{23}[(rho_12 (x) sigma_34)(1 (x) e_23 (x) 1)] on 4x4 inputs.
Mat swap_matrix(const Mat& rho, const Mat& e, const Mat& sigma);

}  // namespace gptlab::qmat
