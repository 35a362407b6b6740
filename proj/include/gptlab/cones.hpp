#pragma once

// Finitely generated convex cones over coefficient tensors.
//
// Generators are kept at their original scale for reporting and, in
// parallel, as unit-norm rays packed column-wise into a dense matrix that
// backs membership (non-negative least squares) and batch pairings.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "gptlab/tensor.hpp"

namespace gptlab {

// Whether a bipartite generator factorizes across its two slots.
enum class Provenance { Unknown, Product, Entangled };
const char* to_string(Provenance p);
std::optional<Provenance> provenance_from_string(std::string_view s);

// True when the 2-slot tensor is a single outer product (coefficient matrix
// of rank one up to `tol` relative to its largest entry).
bool is_product_2slot(const CoeffTensor& x, double tol = 1e-10);

// Lookup of unit-norm rays. Keys quantize coordinates on a 1e-6 grid and the
// final decision is an exact distance test, so a miss near a grid boundary
// costs a duplicate entry but never a false match.
class RayIndex {
 public:
  explicit RayIndex(std::size_t dim = 0, double tol = 1e-9)
      : dim_(dim), tol_(tol) {}

  // Index of a stored ray within tol of `ray`, or -1.
  std::ptrdiff_t find(std::span<const double> ray) const;
  // Inserts unless a match exists; returns the id of the stored ray.
  std::size_t insert(std::span<const double> ray);
  std::size_t size() const { return count_; }
  std::span<const double> ray(std::size_t id) const {
    return {rays_.data() + id * dim_, dim_};
  }

 private:
  static std::uint64_t key(std::span<const double> ray);

  std::size_t dim_;
  double tol_;
  std::size_t count_ = 0;
  std::vector<double> rays_;
  std::unordered_multimap<std::uint64_t, std::size_t> buckets_;
};

class ConeGenerators {
 public:
  ConeGenerators() = default;
  // An empty generator list is the cone {0}.
  ConeGenerators(KindPtr kind, int n_slots, Side side, std::string name);
  ConeGenerators(KindPtr kind, int n_slots, Side side, std::string name,
                 std::vector<CoeffTensor> gens,
                 std::vector<Provenance> tags = {});

  const KindPtr& kind_ptr() const { return kind_; }
  const SystemKind& kind() const { return *kind_; }
  int n_slots() const { return n_slots_; }
  Side side() const { return side_; }
  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return gens_.size(); }
  bool empty() const { return gens_.empty(); }

  const CoeffTensor& generator(std::size_t i) const { return gens_[i]; }
  const std::vector<CoeffTensor>& generators() const { return gens_; }
  std::span<const double> ray(std::size_t i) const {
    return {rays_.data() + static_cast<Eigen::Index>(i * dim_), dim_};
  }
  double scale(std::size_t i) const { return scales_[i]; }
  Provenance tag(std::size_t i) const { return tags_[i]; }
  const std::vector<Provenance>& tags() const { return tags_; }
  // Product/entangled status with Unknown tags resolved numerically.
  bool is_product(std::size_t i) const;

  // Columns are the unit-norm rays.
  const Eigen::MatrixXd& ray_matrix() const { return rays_; }
  // Generator whose ray matches `unit_ray` within 1e-9, or -1.
  std::ptrdiff_t find_ray(std::span<const double> unit_ray) const {
    return index_.find(unit_ray);
  }

  ConeGenerators renamed(std::string name) const;

 private:
  KindPtr kind_;
  int n_slots_ = 0;
  Side side_ = Side::State;
  std::string name_;
  std::size_t dim_ = 0;
  std::vector<CoeffTensor> gens_;
  std::vector<double> scales_;
  std::vector<Provenance> tags_;
  std::vector<char> product_;
  Eigen::MatrixXd rays_;
  RayIndex index_;
};

struct MembershipResult {
  bool inside = false;
  double residual = 0.0;  // relative: ||G w - x|| / ||x||
  // Unit-norm separating functional (coefficient space, Euclidean pairing):
  // present iff !inside. certificate . x > 0 and certificate . g <= tol for
  // every unit-norm generator ray g when certificate_valid.
  std::vector<double> certificate;
  double certificate_margin = 0.0;        // certificate . x / ||x||
  double certificate_max_generator = 0.0;  // max_g certificate . g_hat
  bool certificate_valid = false;
  // Weights over the original-scale generators, present iff inside.
  std::vector<double> weights;
  std::size_t iterations = 0;
};

MembershipResult membership(const ConeGenerators& cone, const CoeffTensor& x,
                            double tol);
MembershipResult membership(const ConeGenerators& cone,
                            std::span<const double> x, double tol);

// Memoizes membership by ray for audits that test many repeated outputs.
class MembershipCache {
 public:
  MembershipCache(const ConeGenerators& cone, double tol);
  // Returns a reference valid until the next call.
  const MembershipResult& query(std::span<const double> x);
  std::size_t distinct() const { return results_.size(); }
  // Id of the ray answered by the last query, or -1 for a zero query.
  std::ptrdiff_t last_id() const { return last_id_; }
  std::size_t solver_calls() const { return solver_calls_; }
  // Normalized query ray and its result, in first-seen order.
  std::span<const double> ray(std::size_t id) const { return index_.ray(id); }
  const MembershipResult& result(std::size_t id) const { return results_[id]; }

 private:
  const ConeGenerators* cone_;
  double tol_;
  RayIndex index_;
  std::vector<MembershipResult> results_;
  MembershipResult zero_;
  std::vector<double> scratch_;
  std::size_t solver_calls_ = 0;
  std::ptrdiff_t last_id_ = -1;
};

struct SubsetFailure {
  std::size_t index = 0;  // generator of the tested cone
  double residual = 0.0;
  std::vector<double> certificate;
};

struct SubsetReport {
  bool holds = true;
  std::size_t tested = 0;
  std::vector<SubsetFailure> failures;
};

// Every generator of `a` lies in `b`.
SubsetReport cone_subset(const ConeGenerators& a, const ConeGenerators& b,
                         double tol);

struct EqualReport {
  bool equal = true;
  SubsetReport a_in_b;
  SubsetReport b_in_a;
};

EqualReport cone_equal(const ConeGenerators& a, const ConeGenerators& b,
                       double tol);

// cone(a ⊗ b): all pairwise products, a's generators outermost.
ConeGenerators minimal_tensor_product(const ConeGenerators& a,
                                      const ConeGenerators& b);

// Closure of the generator list under every slot permutation, deduplicated
// (first occurrence wins).
ConeGenerators symmetrize(const ConeGenerators& cone);

// Applies one slot permutation to every generator.
ConeGenerators permute_cone(const ConeGenerators& cone,
                            std::span<const int> perm);

// Generator list with near-duplicate rays removed (first occurrence wins).
std::vector<std::size_t> distinct_rays(const std::vector<CoeffTensor>& xs,
                                       double tol = 1e-9);

struct PositivityReport {
  bool holds = true;
  std::size_t tested = 0;
  double min_value = 0.0;      // smallest pairing of original generators
  double min_normalized = 0.0;  // smallest pairing of unit rays
  std::size_t min_state = 0;
  std::size_t min_effect = 0;
  // (state, effect, normalized pairing) below -tol, at most 64 entries.
  struct Violation {
    std::size_t state;
    std::size_t effect;
    double value;
  };
  std::vector<Violation> violations;
  std::size_t violation_count = 0;
};

PositivityReport pairwise_positivity(const ConeGenerators& states,
                                     const ConeGenerators& effects,
                                     double tol);

}  // namespace gptlab
