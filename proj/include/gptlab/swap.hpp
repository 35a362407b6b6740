#pragma once

// Entanglement swapping on bipartite coefficient tensors.
//
// Viewing a 2-slot tensor as a d x d matrix (row = slot 0), the swap of
// (rho, e, sigma) is rho * G * e * G * sigma: slot 1 of rho meets slot 0 of
// e, slot 1 of e meets slot 0 of sigma. The dual swap is the same
// expression with the roles of states and effects exchanged. Outputs are
// not renormalized.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gptlab/cones.hpp"
#include "gptlab/tensor.hpp"

namespace gptlab {

CoeffTensor entanglement_swap(const CoeffTensor& rho, const CoeffTensor& e,
                              const CoeffTensor& sigma);
CoeffTensor dual_entanglement_swap(const CoeffTensor& e, const CoeffTensor& rho,
                                   const CoeffTensor& f);

enum class SwapMode { Swap, DualSwap };
const char* to_string(SwapMode mode);

struct SwapFailure {
  std::size_t first = 0;
  std::size_t middle = 0;
  std::size_t last = 0;
  double residual = 0.0;
  std::vector<double> certificate;
  bool certificate_valid = false;
};

struct SwapAudit {
  SwapMode mode = SwapMode::Swap;
  std::size_t tested = 0;   // triples whose output went through membership
  std::size_t skipped = 0;  // triples skipped as factorizable
  std::size_t sampled = 0;  // of `tested`, drawn at random
  std::size_t zero_outputs = 0;  // of `tested`, zero up to rounding
  std::size_t distinct_outputs = 0;
  std::size_t failure_count = 0;
  std::vector<SwapFailure> failures;  // first 64, in enumeration order
  double max_residual = 0.0;          // over members
  // stability_probe only: the common proportionality constant, if any.
  std::optional<double> stability;
  double stability_residual = 0.0;

  bool holds() const { return failure_count == 0; }
};

struct AuditOptions {
  double tol = 0.0;  // 0 selects default_tolerance()
  // Skip triples whose middle generator is a product, or whose two outer
  // generators are both products: their outputs factorize into members.
  bool skip_factorizable = false;
  // 0 enumerates every triple. Otherwise: this many uniform random triples
  // plus every triple made of three entangled generators.
  std::size_t sample = 0;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0 selects default_threads()
  // Keep the distinct nonzero outputs whose generator triple is entangled
  // throughout (rays, unit norm).
  bool collect_entangled_outputs = false;
};

struct SwapAuditResult {
  SwapAudit audit;
  std::vector<CoeffTensor> entangled_outputs;
};

// Swap mode: (rho, e, sigma) in states x effects x states, output in states.
// Dual mode: (e, rho, f) in effects x states x effects, output in effects.
SwapAuditResult closure_audit(const ConeGenerators& states,
                              const ConeGenerators& effects, SwapMode mode,
                              const AuditOptions& options = {});

// Checks entanglement_swap(fixed_state, fixed_effect, rho) == c * rho with
// one c for every generator rho of `states`.
SwapAudit stability_probe(const CoeffTensor& fixed_state,
                          const CoeffTensor& fixed_effect,
                          const ConeGenerators& states, double tol = 1e-9);

}  // namespace gptlab
