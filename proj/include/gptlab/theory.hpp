#pragma once

// Theory data (bipartite effect and state cones over one system kind), the
// unipartite cones derived from them, the ten-step consistency check, and
// the n-partite extension.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gptlab/cones.hpp"
#include "gptlab/swap.hpp"
#include "gptlab/tensor.hpp"

namespace gptlab {

struct TheorySpec {
  std::string name;
  KindPtr kind;
  ConeGenerators P2;  // bipartite effects
  ConeGenerators D2;  // bipartite states
  // Filled by derive(): unit-effect marginals of D2, and contractions of P2
  // against those marginals.
  ConeGenerators D1;
  ConeGenerators P1;
  bool derived = false;
  // Claimed generators (convex hull) of the unipartite effect space.
  std::optional<std::vector<CoeffTensor>> effect_space;
};

struct Unipartite {
  ConeGenerators D1;
  ConeGenerators P1;
};

Unipartite derive_unipartite(const ConeGenerators& P2, const ConeGenerators& D2);

// Builds a spec and derives its unipartite cones.
TheorySpec make_theory(std::string name, ConeGenerators P2, ConeGenerators D2,
                       std::optional<std::vector<CoeffTensor>> effect_space = {});

struct ConsistencyOptions {
  double tol = 0.0;  // 0 selects default_tolerance()
  bool skip_factorizable = false;
  std::size_t sample = 0;  // see AuditOptions
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  // Keep running after the first failing check instead of returning.
  bool run_all = false;
};

struct CheckEntry {
  int id = 0;
  std::string name;
  std::string tag;  // the listing comment the check belongs to
  enum class Status { Pass, Fail, Skipped, NotRun } status = Status::NotRun;
  std::string detail;
  std::vector<std::size_t> witness;  // generator indices on failure
  std::vector<double> certificate;
  double value = 0.0;  // check-specific figure (min pairing, residual, ...)
  double seconds = 0.0;

  bool passed() const {
    return status == Status::Pass || status == Status::Skipped;
  }
};
const char* to_string(CheckEntry::Status s);

struct ConsistencyReport {
  bool consistent = false;
  int first_failure = 0;  // check id, 0 if none
  std::vector<CheckEntry> checks;
  std::optional<SwapAudit> swap_audit;
  std::optional<SwapAudit> dual_audit;
  double seconds = 0.0;
};

ConsistencyReport check_consistency(const TheorySpec& spec,
                                    const ConsistencyOptions& options = {});

// Algorithm-style n-partite cones. n = 1 and n = 2 return the stored cones.
struct ExtendedCones {
  ConeGenerators P;
  ConeGenerators D;
};
ExtendedCones extend_n(const TheorySpec& spec, int n,
                       std::size_t generator_cap = 1000000);

// 1^{⊗n} - e.
CoeffTensor negation(const CoeffTensor& e);

// {2 g - 1 : g in effect space}.
std::vector<CoeffTensor> correlators(const TheorySpec& spec);

struct NormalizedStates {
  std::vector<CoeffTensor> states;
  std::vector<std::size_t> source;    // generator index of each state
  std::vector<std::size_t> excluded;  // generators with zero unit pairing
};
NormalizedStates normalize_states(const ConeGenerators& cone);

struct EffectSpaceReport {
  bool holds = true;
  std::vector<std::size_t> missing;          // g not in P1
  std::vector<std::size_t> negation_missing;  // 1 - g not in P1
  double worst_residual = 0.0;
};
// Each listed g and its negation lie in P1.
EffectSpaceReport verify_effect_space(const TheorySpec& spec, double tol);

// Negation closure at generator level: every 1 - g is a convex combination
// of the listed generators (membership of (1 - g, 1) in the cone over the
// lifted points (g, 1)).
EffectSpaceReport negation_hull_closure(const TheorySpec& spec, double tol);

}  // namespace gptlab
