#pragma once

// Built-in theories: the stretched qubit stabilizer theory and its r = 1
// quantum variant, gbit boxworld, and a two-degree-of-freedom composite
// built from gbits.

#include <cmath>
#include <string>
#include <vector>

#include "gptlab/chsh.hpp"
#include "gptlab/cones.hpp"
#include "gptlab/theory.hpp"

namespace gptlab {

// 2^{1/4}: the largest equatorial stretch that keeps unipartite pairings
// nonnegative once effects are rotated by pi/4.
inline double ost_critical_radius() { return std::pow(2.0, 0.25); }

// (R^{-m} sigma_mu (x) 1) |Phi+><Phi+| (sigma_mu R^m (x) 1) in Pauli
// coefficients; m is taken mod 8.
CoeffTensor ost_phi(int mu, int m);

struct OstModel {
  double r = 0.0;
  TheorySpec spec;
  Strategy strategy;
  // x+, x-, y+, y-, z+, z-
  std::vector<CoeffTensor> omega;          // states
  std::vector<CoeffTensor> omega_rotated;  // effects R omega R^dagger
  std::vector<CoeffTensor> phi;            // index 4 * mu + (m - 1) / 2
};

OstModel build_ost(double r = ost_critical_radius());

struct GbitModel {
  std::vector<CoeffTensor> states;   // (1, +-1, +-1): ++, +-, -+, --
  std::vector<CoeffTensor> effects;  // x+, x-, y+, y- extremal, then unit
  ConeGenerators D1;
  ConeGenerators P1;
  // No-signalling box vertices: 16 deterministic products, then 8 boxes
  // diag(1, C) with C a +-1 matrix holding an odd number of -1 entries.
  ConeGenerators Dmax;
  // Effects dual to the product states: (A (x) A) Dmax for the linear map A
  // carrying the state square onto the effect diamond.
  ConeGenerators Pmax;
  // Product-only bipartite theory (states and effects both minimal).
  TheorySpec product_theory;
  // Correlators (0,1,0) and (0,0,1) on both sides.
  ChshSetting setting;
};

GbitModel build_gbit();

struct GbitVerification {
  bool holds = true;
  double min_dual_pairing = 0.0;      // Dmax against product effects
  double min_effect_pairing = 0.0;    // Pmax against product states
  double max_box_chsh = 0.0;          // over the 8 box vertices
  double max_product_chsh = 0.0;      // over the 16 deterministic products
  std::vector<std::string> problems;
};
GbitVerification verify_gbit(const GbitModel& m);

// Signed 2x2 permutations T acting as diag(1, T) on one gbit slot.
std::vector<std::vector<double>> gbit_square_symmetries();

struct CompositeModel {
  KindPtr kind;  // two gbits fused per particle, dof 1 major
  TheorySpec spec;
  Strategy strategy;
};

CompositeModel build_composite();

}  // namespace gptlab
