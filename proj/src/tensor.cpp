#include "gptlab/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "gptlab/config.hpp"
#include "gptlab/kernels.hpp"

namespace gptlab {

bool SystemKind::operator==(const SystemKind& other) const {
  return slot_dim == other.slot_dim && gram == other.gram &&
         unit == other.unit && label == other.label;
}

KindPtr make_kind(int slot_dim, std::vector<double> gram,
                  std::vector<double> unit, std::string label) {
  if (slot_dim <= 0) throw InputError("slot_dim must be positive");
  const auto d = static_cast<std::size_t>(slot_dim);
  if (gram.size() != d * d)
    throw InputError("gram must have slot_dim^2 entries");
  if (unit.size() != d) throw InputError("unit must have slot_dim entries");

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      g(gram.data(), slot_dim, slot_dim);
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.norm()))
    throw InputError("gram must be symmetric");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  lu.setThreshold(1e-12);
  if (lu.rank() != slot_dim) throw InputError("gram must be invertible");
  if (std::all_of(unit.begin(), unit.end(), [](double v) { return v == 0.0; }))
    throw InputError("unit effect must be nonzero");

  SystemKind k;
  k.slot_dim = slot_dim;
  k.gram = std::move(gram);
  k.unit = std::move(unit);
  k.label = std::move(label);

  const double s = k.gram[0];
  bool scaled_identity = s != 0.0;
  for (std::size_t i = 0; i < d && scaled_identity; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (k.gram[i * d + j] != (i == j ? s : 0.0)) {
        scaled_identity = false;
        break;
      }
  k.gram_scale = scaled_identity ? s : 0.0;
  return std::make_shared<const SystemKind>(std::move(k));
}

const KindPtr& pauli_qubit_kind() {
  static const KindPtr kind = make_kind(
      4, {2, 0, 0, 0, 0, 2, 0, 0, 0, 0, 2, 0, 0, 0, 0, 2}, {1, 0, 0, 0},
      "pauli-qubit");
  return kind;
}

const KindPtr& gbit_kind() {
  static const KindPtr kind =
      make_kind(3, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {1, 0, 0}, "gbit");
  return kind;
}

KindPtr fused_kind(const KindPtr& a, const KindPtr& b, std::string label) {
  const int da = a->slot_dim;
  const int db = b->slot_dim;
  const int d = da * db;
  std::vector<double> gram(static_cast<std::size_t>(d * d));
  for (int i1 = 0; i1 < da; ++i1)
    for (int i2 = 0; i2 < db; ++i2)
      for (int j1 = 0; j1 < da; ++j1)
        for (int j2 = 0; j2 < db; ++j2)
          gram[static_cast<std::size_t>((i1 * db + i2) * d + j1 * db + j2)] =
              a->gram[static_cast<std::size_t>(i1 * da + j1)] *
              b->gram[static_cast<std::size_t>(i2 * db + j2)];
  std::vector<double> unit(static_cast<std::size_t>(d));
  for (int i1 = 0; i1 < da; ++i1)
    for (int i2 = 0; i2 < db; ++i2)
      unit[static_cast<std::size_t>(i1 * db + i2)] =
          a->unit[static_cast<std::size_t>(i1)] *
          b->unit[static_cast<std::size_t>(i2)];
  return make_kind(d, std::move(gram), std::move(unit), std::move(label));
}

bool same_kind(const KindPtr& a, const KindPtr& b) {
  return a == b || (a && b && *a == *b);
}

const char* to_string(Side side) {
  return side == Side::State ? "state" : "effect";
}

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

CoeffTensor::CoeffTensor(KindPtr kind, int n_slots, std::vector<double> coeffs,
                         Side side)
    : kind_(std::move(kind)),
      n_slots_(n_slots),
      coeffs_(std::move(coeffs)),
      side_(side) {
  if (!kind_) throw InputError("tensor requires a system kind");
  if (n_slots_ < 0) throw InputError("n_slots must be nonnegative");
  if (coeffs_.size() !=
      ipow(static_cast<std::size_t>(kind_->slot_dim), n_slots_))
    throw InputError("coefficient count " + std::to_string(coeffs_.size()) +
                     " does not match slot_dim^n_slots = " +
                     std::to_string(ipow(
                         static_cast<std::size_t>(kind_->slot_dim), n_slots_)));
}

CoeffTensor CoeffTensor::zeros(KindPtr kind, int n_slots, Side side) {
  const auto n = ipow(static_cast<std::size_t>(kind->slot_dim), n_slots);
  return CoeffTensor(std::move(kind), n_slots, std::vector<double>(n, 0.0),
                     side);
}

CoeffTensor CoeffTensor::unit(KindPtr kind, int n_slots) {
  CoeffTensor u(kind, 0, {1.0}, Side::Effect);
  CoeffTensor one(kind, 1, kind->unit, Side::Effect);
  for (int i = 0; i < n_slots; ++i) u = tensor_product(u, one);
  return u;
}

double CoeffTensor::at(std::initializer_list<int> index) const {
  if (static_cast<int>(index.size()) != n_slots_)
    throw InputError("index arity does not match n_slots");
  std::size_t flat = 0;
  for (int i : index) {
    if (i < 0 || i >= kind_->slot_dim) throw InputError("index out of range");
    flat = flat * static_cast<std::size_t>(kind_->slot_dim) +
           static_cast<std::size_t>(i);
  }
  return coeffs_[flat];
}

double CoeffTensor::scalar_value() const {
  if (!is_scalar()) throw InputError("tensor is not a scalar");
  return coeffs_[0];
}

double CoeffTensor::norm() const {
  return std::sqrt(kernels::dot(coeffs_.data(), coeffs_.data(), coeffs_.size()));
}

CoeffTensor CoeffTensor::with_side(Side side) const {
  CoeffTensor copy = *this;
  copy.side_ = side;
  return copy;
}

CoeffTensor& CoeffTensor::operator+=(const CoeffTensor& other) {
  if (other.n_slots_ != n_slots_ || !same_kind(kind_, other.kind_))
    throw InputError("cannot add tensors of different shapes");
  kernels::axpy(1.0, other.coeffs_.data(), coeffs_.data(), coeffs_.size());
  return *this;
}

CoeffTensor& CoeffTensor::operator-=(const CoeffTensor& other) {
  if (other.n_slots_ != n_slots_ || !same_kind(kind_, other.kind_))
    throw InputError("cannot subtract tensors of different shapes");
  kernels::axpy(-1.0, other.coeffs_.data(), coeffs_.data(), coeffs_.size());
  return *this;
}

CoeffTensor& CoeffTensor::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

CoeffTensor tensor_product(const CoeffTensor& a, const CoeffTensor& b) {
  if (!same_kind(a.kind_ptr(), b.kind_ptr()))
    throw InputError("tensor_product: kind mismatch");
  if (a.side() != b.side() && !a.is_scalar() && !b.is_scalar())
    throw InputError("tensor_product: side mismatch");
  const Side side = a.is_scalar() ? b.side() : a.side();
  std::vector<double> out(a.size() * b.size());
  const auto bs = b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    double* row = out.data() + i * bs;
    for (std::size_t j = 0; j < bs; ++j) row[j] = ai * b[j];
  }
  return CoeffTensor(a.kind_ptr(), a.n_slots() + b.n_slots(), std::move(out),
                     side);
}

std::vector<int> inverse_permutation(std::span<const int> perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k)
    inv[static_cast<std::size_t>(perm[k])] = static_cast<int>(k);
  return inv;
}

CoeffTensor permute_slots(const CoeffTensor& x, std::span<const int> perm) {
  const int n = x.n_slots();
  if (static_cast<int>(perm.size()) != n)
    throw InputError("permute_slots: permutation length " +
                     std::to_string(perm.size()) + " != n_slots " +
                     std::to_string(n));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)])
      throw InputError("permute_slots: not a permutation");
    seen[static_cast<std::size_t>(p)] = true;
  }
  const auto d = static_cast<std::size_t>(x.slot_dim());
  // Stride in x of each slot.
  std::vector<std::size_t> stride(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) stride[static_cast<std::size_t>(k)] = ipow(d, n - 1 - k);
  // Result slot k walks source slot perm[k].
  std::vector<std::size_t> src_stride(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    src_stride[static_cast<std::size_t>(k)] =
        stride[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];

  std::vector<double> out(x.size());
  std::vector<std::size_t> counter(static_cast<std::size_t>(n), 0);
  std::size_t src = 0;
  for (std::size_t dst = 0; dst < out.size(); ++dst) {
    out[dst] = x[src];
    for (int k = n - 1; k >= 0; --k) {
      auto& c = counter[static_cast<std::size_t>(k)];
      ++c;
      src += src_stride[static_cast<std::size_t>(k)];
      if (c < d) break;
      c = 0;
      src -= d * src_stride[static_cast<std::size_t>(k)];
    }
  }
  return CoeffTensor(x.kind_ptr(), n, std::move(out), x.side());
}

CoeffTensor apply_slot_map(const CoeffTensor& x, int slot,
                           std::span<const double> matrix) {
  const auto d = static_cast<std::size_t>(x.slot_dim());
  if (slot < 0 || slot >= x.n_slots())
    throw InputError("apply_slot_map: slot out of range");
  if (matrix.size() != d * d)
    throw InputError("apply_slot_map: matrix must be slot_dim x slot_dim");
  const std::size_t outer = ipow(d, slot);
  const std::size_t inner = ipow(d, x.n_slots() - slot - 1);
  std::vector<double> out(x.size());
  for (std::size_t o = 0; o < outer; ++o) {
    kernels::gemm(d, d, inner, matrix.data(), x.data() + o * d * inner,
                  out.data() + o * d * inner);
  }
  return CoeffTensor(x.kind_ptr(), x.n_slots(), std::move(out), x.side());
}

CoeffTensor contract(const CoeffTensor& state, const CoeffTensor& effect,
                     std::span<const std::pair<int, int>> slots) {
  if (!same_kind(state.kind_ptr(), effect.kind_ptr()))
    throw InputError("contract: kind mismatch");
  const int ns = state.n_slots();
  const int ne = effect.n_slots();
  std::vector<bool> used_s(static_cast<std::size_t>(ns), false);
  std::vector<bool> used_e(static_cast<std::size_t>(ne), false);
  for (auto [s, e] : slots) {
    if (s < 0 || s >= ns || e < 0 || e >= ne)
      throw InputError("contract: slot out of range");
    if (used_s[static_cast<std::size_t>(s)] || used_e[static_cast<std::size_t>(e)])
      throw InputError("contract: slot paired twice");
    used_s[static_cast<std::size_t>(s)] = true;
    used_e[static_cast<std::size_t>(e)] = true;
  }

  std::vector<int> state_perm;
  std::vector<int> effect_perm;
  for (int k = 0; k < ns; ++k)
    if (!used_s[static_cast<std::size_t>(k)]) state_perm.push_back(k);
  const int rest_s = static_cast<int>(state_perm.size());
  for (auto [s, e] : slots) {
    state_perm.push_back(s);
    effect_perm.push_back(e);
  }
  for (int k = 0; k < ne; ++k)
    if (!used_e[static_cast<std::size_t>(k)]) effect_perm.push_back(k);
  const int rest_e = ne - static_cast<int>(slots.size());
  const int paired = static_cast<int>(slots.size());

  const CoeffTensor s_perm = permute_slots(state, state_perm);
  CoeffTensor e_perm = permute_slots(effect, effect_perm);
  const SystemKind& kind = state.kind();
  if (kind.gram_scale != 0.0) {
    e_perm *= std::pow(kind.gram_scale, paired);
  } else {
    for (int k = 0; k < paired; ++k) e_perm = apply_slot_map(e_perm, k, kind.gram);
  }

  const auto d = static_cast<std::size_t>(kind.slot_dim);
  const std::size_t rows = ipow(d, rest_s);
  const std::size_t inner = ipow(d, paired);
  const std::size_t cols = ipow(d, rest_e);
  std::vector<double> out(rows * cols);
  kernels::gemm(rows, inner, cols, s_perm.data(), e_perm.data(), out.data());

  Side side = Side::State;
  if (rest_s == 0 && rest_e > 0) side = Side::Effect;
  return CoeffTensor(state.kind_ptr(), rest_s + rest_e, std::move(out), side);
}

CoeffTensor contract(const CoeffTensor& state, const CoeffTensor& effect,
                     std::initializer_list<std::pair<int, int>> slots) {
  return contract(state, effect,
                  std::span<const std::pair<int, int>>(slots.begin(), slots.size()));
}

double pairing(const CoeffTensor& state, const CoeffTensor& effect) {
  if (!same_kind(state.kind_ptr(), effect.kind_ptr()))
    throw InputError("pairing: kind mismatch");
  if (state.n_slots() != effect.n_slots())
    throw InputError("pairing: slot count mismatch");
  const SystemKind& kind = state.kind();
  if (kind.gram_scale != 0.0) {
    return std::pow(kind.gram_scale, state.n_slots()) *
           kernels::dot(state.data(), effect.data(), state.size());
  }
  CoeffTensor g = effect;
  for (int k = 0; k < g.n_slots(); ++k) g = apply_slot_map(g, k, kind.gram);
  return kernels::dot(state.data(), g.data(), state.size());
}

double max_abs_diff(const CoeffTensor& a, const CoeffTensor& b) {
  if (a.size() != b.size()) throw InputError("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace gptlab
