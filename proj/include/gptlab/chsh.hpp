#pragma once

// CHSH observables, theory-level CHSH values, and the iterated game in which
// a chain of link states is joined by intermediate measurements.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gptlab/cones.hpp"
#include "gptlab/tensor.hpp"
#include "gptlab/theory.hpp"

namespace gptlab {

// One-slot correlators for the two parties.
struct ChshSetting {
  CoeffTensor A0, A1, B0, B1;
};

// A0 B0 + A0 B1 + A1 B0 - A1 B1.
CoeffTensor chsh_observable(const ChshSetting& s);
// Signed pairing of a bipartite state with the observable.
double chsh_value(const CoeffTensor& state, const ChshSetting& s);

struct ChshWitness {
  double value = 0.0;  // |raw|
  double raw = 0.0;
  std::size_t state = 0;  // index into D2
  std::size_t a0 = 0, a1 = 0, b0 = 0, b1 = 0;  // indices into correlators()
};

// Maximum of |chsh_value| over normalized D2 generators and correlator
// tuples drawn from the effect space.
ChshWitness theory_chsh_value(const TheorySpec& spec);

struct Strategy {
  CoeffTensor link_state;
  std::vector<CoeffTensor> measurement;
  // corrections[b] acts on slot 0 of the end-to-end state (d x d, row-major).
  std::vector<std::vector<double>> corrections;
  ChshSetting setting;
  // table[a][b] = outcome composed of a and b.
  std::optional<std::vector<std::vector<int>>> group_law;
};

struct StrategyReport {
  bool valid = true;
  double completeness_residual = 0.0;
  std::vector<std::string> problems;
};

// Measurement completeness, group-law axioms, correlator bounds on D1 and
// corrections mapping D2 into itself (the last two only when cones given).
StrategyReport validate_strategy(const Strategy& s,
                                 const ConeGenerators* D1 = nullptr,
                                 const ConeGenerators* D2 = nullptr,
                                 double tol = 1e-9);

// Outcome of one branch of the game.
struct GameBranch {
  std::vector<int> outcomes;
  double probability = 0.0;
  double raw = 0.0;   // signed CHSH value of the corrected, normalized state
  double beta = 0.0;  // |raw|
  int composed = -1;  // group element, when a group law is present
};

struct GameResult {
  int rounds = 0;
  double beta = 0.0;
  double probability_sum = 0.0;
  std::size_t zero_branches = 0;
  std::vector<GameBranch> table;  // exhaustive path only
  // Total probability of each composed outcome (group law present).
  std::vector<double> class_probability;
  bool fell_back = false;  // fast path could not verify closure
  std::string note;
};

GameResult iterate_game_exhaustive(const Strategy& s, int n,
                                   std::size_t cap = std::size_t{1} << 20);

// Tracks only the composed outcome; requires a group law and verifies
// that one swap maps each class state to a class state.
GameResult iterate_game_fast(const Strategy& s, int n, double tol = 1e-9,
                             std::size_t fallback_cap = std::size_t{1} << 20);

}  // namespace gptlab
