#pragma once

// Coefficient-tensor representation of multipartite states and effects.
//
// Every object lives in (R^d)^{⊗n} for a per-slot dimension d fixed by its
// SystemKind. Coefficients are stored slot-major: the flat index of the
// multi-index (i_0, ..., i_{n-1}) is sum_k i_k * d^(n-1-k), so the basis
// index of the last slot varies fastest. The pairing between a state slot
// and an effect slot is the symmetric bilinear form `gram`.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gptlab {

struct SystemKind {
  int slot_dim = 0;
  std::vector<double> gram;  // slot_dim x slot_dim, row-major
  std::vector<double> unit;  // unit effect coefficients, length slot_dim
  std::string label;

  // Nonzero when gram == scale * identity; lets pairings skip the metric.
  double gram_scale = 0.0;

  bool operator==(const SystemKind& other) const;
};

using KindPtr = std::shared_ptr<const SystemKind>;

// Validates symmetry/invertibility of gram and returns a shared kind.
KindPtr make_kind(int slot_dim, std::vector<double> gram,
                  std::vector<double> unit, std::string label);

// Qubit Pauli basis (sigma_0..sigma_3): gram = 2 I, unit = (1, 0, 0, 0).
const KindPtr& pauli_qubit_kind();
// Boxworld gbit: states (1, s1, s2), gram = I, unit = (1, 0, 0).
const KindPtr& gbit_kind();
// One slot carrying two degrees of freedom a (major) and b (minor).
KindPtr fused_kind(const KindPtr& a, const KindPtr& b, std::string label);

bool same_kind(const KindPtr& a, const KindPtr& b);

enum class Side { State, Effect };
const char* to_string(Side side);

class CoeffTensor {
 public:
  CoeffTensor() = default;
  CoeffTensor(KindPtr kind, int n_slots, std::vector<double> coeffs,
              Side side);

  static CoeffTensor zeros(KindPtr kind, int n_slots, Side side);
  // unit^{⊗n} as an effect.
  static CoeffTensor unit(KindPtr kind, int n_slots);

  const SystemKind& kind() const { return *kind_; }
  const KindPtr& kind_ptr() const { return kind_; }
  int n_slots() const { return n_slots_; }
  int slot_dim() const { return kind_->slot_dim; }
  std::size_t size() const { return coeffs_.size(); }
  Side side() const { return side_; }

  std::span<const double> coeffs() const { return coeffs_; }
  const double* data() const { return coeffs_.data(); }
  double* data() { return coeffs_.data(); }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }
  double at(std::initializer_list<int> index) const;

  // A 0-slot tensor is a scalar; full contractions produce one.
  bool is_scalar() const { return n_slots_ == 0; }
  double scalar_value() const;

  double norm() const;
  CoeffTensor with_side(Side side) const;

  CoeffTensor& operator+=(const CoeffTensor& other);
  CoeffTensor& operator-=(const CoeffTensor& other);
  CoeffTensor& operator*=(double s);
  friend CoeffTensor operator+(CoeffTensor a, const CoeffTensor& b) {
    return a += b;
  }
  friend CoeffTensor operator-(CoeffTensor a, const CoeffTensor& b) {
    return a -= b;
  }
  friend CoeffTensor operator*(double s, CoeffTensor a) { return a *= s; }

 private:
  KindPtr kind_;
  int n_slots_ = 0;
  std::vector<double> coeffs_;
  Side side_ = Side::State;
};

std::size_t ipow(std::size_t base, int exp);

// Outer product; slot lists concatenate (a's slots first).
CoeffTensor tensor_product(const CoeffTensor& a, const CoeffTensor& b);

// Slot k of the result holds slot perm[k] of x, i.e. pi(x)_{1..n} =
// x_{pi(1)..pi(n)}.
CoeffTensor permute_slots(const CoeffTensor& x, std::span<const int> perm);
std::vector<int> inverse_permutation(std::span<const int> perm);

// Contracts the listed (state_slot, effect_slot) pairs through the gram
// form. The result carries the uncontracted state slots (in order) followed
// by the uncontracted effect slots. It is a scalar when nothing is left, a
// conditional effect when only effect slots remain, otherwise a state.
CoeffTensor contract(const CoeffTensor& state, const CoeffTensor& effect,
                     std::span<const std::pair<int, int>> slots);
CoeffTensor contract(const CoeffTensor& state, const CoeffTensor& effect,
                     std::initializer_list<std::pair<int, int>> slots);

// Full canonical pairing <state, effect>, slot i against slot i.
double pairing(const CoeffTensor& state, const CoeffTensor& effect);

// Applies a d x d row-major matrix to one slot: y[..a..] = sum_b M[a][b] x[..b..].
CoeffTensor apply_slot_map(const CoeffTensor& x, int slot,
                           std::span<const double> matrix);

double max_abs_diff(const CoeffTensor& a, const CoeffTensor& b);

}  // namespace gptlab
