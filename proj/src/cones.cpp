#include "gptlab/cones.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "gptlab/config.hpp"
#include "gptlab/kernels.hpp"
#include "gptlab/nnls.hpp"

namespace gptlab {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Product:
      return "product";
    case Provenance::Entangled:
      return "entangled";
    case Provenance::Unknown:
      break;
  }
  return "unknown";
}

std::optional<Provenance> provenance_from_string(std::string_view s) {
  if (s == "product") return Provenance::Product;
  if (s == "entangled") return Provenance::Entangled;
  if (s == "unknown") return Provenance::Unknown;
  return std::nullopt;
}

bool is_product_2slot(const CoeffTensor& x, double tol) {
  if (x.n_slots() != 2) throw InputError("is_product_2slot: need 2 slots");
  const auto d = static_cast<std::size_t>(x.slot_dim());
  std::size_t pivot = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i]) > best) {
      best = std::abs(x[i]);
      pivot = i;
    }
  if (best == 0.0) return true;
  const std::size_t p = pivot / d;
  const std::size_t q = pivot % d;
  const double piv = x[pivot];
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double rank1 = x[i * d + q] * x[p * d + j] / piv;
      if (std::abs(x[i * d + j] - rank1) > tol * best) return false;
    }
  return true;
}

// ---------------------------------------------------------------- RayIndex

std::uint64_t RayIndex::key(std::span<const double> ray) {
  std::uint64_t h = 1469598103934665603ull;
  for (double v : ray) {
    const auto q = static_cast<std::int64_t>(std::llround(v * 1e6));
    h ^= static_cast<std::uint64_t>(q) + 0x9e3779b97f4a7c15ull + (h << 6) +
         (h >> 2);
  }
  return h;
}

std::ptrdiff_t RayIndex::find(std::span<const double> ray) const {
  if (ray.size() != dim_) return -1;
  const auto [lo, hi] = buckets_.equal_range(key(ray));
  const double tol2 = tol_ * tol_;
  for (auto it = lo; it != hi; ++it) {
    const double* stored = rays_.data() + it->second * dim_;
    double d2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const double diff = stored[i] - ray[i];
      d2 += diff * diff;
    }
    if (d2 <= tol2) return static_cast<std::ptrdiff_t>(it->second);
  }
  return -1;
}

std::size_t RayIndex::insert(std::span<const double> ray) {
  if (ray.size() != dim_) throw InputError("RayIndex: dimension mismatch");
  if (const auto hit = find(ray); hit >= 0) return static_cast<std::size_t>(hit);
  const std::size_t id = count_++;
  rays_.insert(rays_.end(), ray.begin(), ray.end());
  buckets_.emplace(key(ray), id);
  return id;
}

// ---------------------------------------------------------- ConeGenerators

ConeGenerators::ConeGenerators(KindPtr kind, int n_slots, Side side,
                               std::string name)
    : ConeGenerators(std::move(kind), n_slots, side, std::move(name), {}, {}) {}

ConeGenerators::ConeGenerators(KindPtr kind, int n_slots, Side side,
                               std::string name, std::vector<CoeffTensor> gens,
                               std::vector<Provenance> tags)
    : kind_(std::move(kind)),
      n_slots_(n_slots),
      side_(side),
      name_(std::move(name)),
      gens_(std::move(gens)),
      tags_(std::move(tags)) {
  if (!kind_) throw InputError("cone requires a system kind");
  dim_ = ipow(static_cast<std::size_t>(kind_->slot_dim), n_slots_);
  if (tags_.empty()) tags_.assign(gens_.size(), Provenance::Unknown);
  if (tags_.size() != gens_.size())
    throw InputError("cone '" + name_ + "': tag count does not match generators");
  rays_.resize(static_cast<Eigen::Index>(dim_),
               static_cast<Eigen::Index>(gens_.size()));
  scales_.reserve(gens_.size());
  index_ = RayIndex(dim_, 1e-9);
  product_.assign(gens_.size(), 0);
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    CoeffTensor& g = gens_[i];
    if (!same_kind(g.kind_ptr(), kind_) || g.n_slots() != n_slots_)
      throw InputError("cone '" + name_ + "': generator " + std::to_string(i) +
                       " has the wrong shape");
    g = g.with_side(side_);
    const double s = g.norm();
    if (!(s > 0.0) || !std::isfinite(s))
      throw InputError("cone '" + name_ + "': generator " + std::to_string(i) +
                       " is zero or not finite");
    scales_.push_back(s);
    auto col = rays_.col(static_cast<Eigen::Index>(i));
    for (std::size_t k = 0; k < dim_; ++k)
      col(static_cast<Eigen::Index>(k)) = g[k] / s;
    index_.insert({col.data(), dim_});
    if (n_slots_ == 2) {
      const bool numeric = is_product_2slot(g);
      if (tags_[i] == Provenance::Product && !numeric)
        throw InputError("cone '" + name_ + "': generator " +
                         std::to_string(i) +
                         " is tagged product but does not factorize");
      product_[i] = tags_[i] == Provenance::Unknown
                        ? static_cast<char>(numeric)
                        : static_cast<char>(tags_[i] == Provenance::Product);
    }
  }
}

bool ConeGenerators::is_product(std::size_t i) const {
  return product_[i] != 0;
}

ConeGenerators ConeGenerators::renamed(std::string name) const {
  ConeGenerators c = *this;
  c.name_ = std::move(name);
  return c;
}

// -------------------------------------------------------------- membership

MembershipResult membership(const ConeGenerators& cone,
                            std::span<const double> x, double tol) {
  if (x.size() != cone.dim())
    throw InputError("membership: query dimension " + std::to_string(x.size()) +
                     " does not match cone '" + cone.name() + "' (" +
                     std::to_string(cone.dim()) + ")");
  if (!(tol > 0.0)) throw InputError("membership: tol must be positive");
  MembershipResult out;
  const double xnorm =
      std::sqrt(kernels::dot(x.data(), x.data(), x.size()));
  if (xnorm == 0.0) {
    out.inside = true;
    out.weights.assign(cone.size(), 0.0);
    return out;
  }
  Eigen::VectorXd xhat(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    xhat(static_cast<Eigen::Index>(i)) = x[i] / xnorm;

  if (cone.empty()) {
    out.residual = 1.0;
    out.certificate.assign(xhat.data(), xhat.data() + xhat.size());
    out.certificate_margin = 1.0;
    out.certificate_max_generator = -std::numeric_limits<double>::infinity();
    out.certificate_valid = true;
    return out;
  }

  if (const auto hit = cone.find_ray({xhat.data(), x.size()}); hit >= 0) {
    out.inside = true;
    out.weights.assign(cone.size(), 0.0);
    out.weights[static_cast<std::size_t>(hit)] =
        xnorm / cone.scale(static_cast<std::size_t>(hit));
    Eigen::VectorXd diff =
        cone.ray_matrix().col(static_cast<Eigen::Index>(hit)) - xhat;
    out.residual = diff.norm();
    return out;
  }

  NnlsOptions opts;
  opts.target_residual = 1e-3 * tol;
  opts.dual_rel = 1e-3 * tol;
  opts.dual_abs = 1e-15;
  const NnlsResult sol = solve_nnls(cone.ray_matrix(), xhat, opts);
  out.iterations = sol.iterations;
  out.residual = sol.residual_norm;
  out.inside = sol.residual_norm <= tol;
  if (out.inside) {
    out.weights.resize(cone.size());
    for (std::size_t j = 0; j < cone.size(); ++j)
      out.weights[j] = sol.x(static_cast<Eigen::Index>(j)) * xnorm / cone.scale(j);
    return out;
  }
  const double rn = sol.residual_norm;
  out.certificate.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.certificate[i] = sol.residual(static_cast<Eigen::Index>(i)) / rn;
  out.certificate_margin = sol.residual.dot(xhat) / rn;
  out.certificate_max_generator = sol.dual.maxCoeff() / rn;
  out.certificate_valid =
      out.certificate_margin > 0.0 && out.certificate_max_generator <= tol;
  return out;
}

MembershipResult membership(const ConeGenerators& cone, const CoeffTensor& x,
                            double tol) {
  if (!same_kind(cone.kind_ptr(), x.kind_ptr()) || x.n_slots() != cone.n_slots())
    throw InputError("membership: tensor shape does not match cone '" +
                     cone.name() + "'");
  return membership(cone, x.coeffs(), tol);
}

MembershipCache::MembershipCache(const ConeGenerators& cone, double tol)
    : cone_(&cone), tol_(tol), index_(cone.dim(), 1e-12) {
  zero_.inside = true;
  scratch_.resize(cone.dim());
}

const MembershipResult& MembershipCache::query(std::span<const double> x) {
  const double n = std::sqrt(kernels::dot(x.data(), x.data(), x.size()));
  last_id_ = -1;
  if (n == 0.0) return zero_;
  for (std::size_t i = 0; i < x.size(); ++i) scratch_[i] = x[i] / n;
  if (const auto hit = index_.find(scratch_); hit >= 0) {
    last_id_ = hit;
    return results_[static_cast<std::size_t>(hit)];
  }
  ++solver_calls_;
  MembershipResult r = membership(*cone_, scratch_, tol_);
  r.weights.clear();
  last_id_ = static_cast<std::ptrdiff_t>(index_.insert(scratch_));
  results_.push_back(std::move(r));
  return results_.back();
}

// ----------------------------------------------------------- subset/equal

SubsetReport cone_subset(const ConeGenerators& a, const ConeGenerators& b,
                         double tol) {
  if (!same_kind(a.kind_ptr(), b.kind_ptr()) || a.n_slots() != b.n_slots())
    throw InputError("cone_subset: shape mismatch between '" + a.name() +
                     "' and '" + b.name() + "'");
  std::vector<MembershipResult> results(a.size());
  parallel_for(a.size(), default_threads(), [&](std::size_t i) {
    results[i] = membership(b, a.ray(i), tol);
  });
  SubsetReport report;
  report.tested = a.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (results[i].inside) continue;
    report.holds = false;
    report.failures.push_back(
        {i, results[i].residual, std::move(results[i].certificate)});
  }
  return report;
}

EqualReport cone_equal(const ConeGenerators& a, const ConeGenerators& b,
                       double tol) {
  EqualReport r;
  r.a_in_b = cone_subset(a, b, tol);
  r.b_in_a = cone_subset(b, a, tol);
  r.equal = r.a_in_b.holds && r.b_in_a.holds;
  return r;
}

// ------------------------------------------------------------ constructions

ConeGenerators minimal_tensor_product(const ConeGenerators& a,
                                      const ConeGenerators& b) {
  if (!same_kind(a.kind_ptr(), b.kind_ptr()))
    throw InputError("minimal_tensor_product: kind mismatch");
  std::vector<CoeffTensor> gens;
  gens.reserve(a.size() * b.size());
  for (const auto& g : a.generators())
    for (const auto& h : b.generators())
      gens.push_back(tensor_product(g, h.with_side(g.side())));
  const Provenance tag = a.n_slots() == 1 && b.n_slots() == 1
                             ? Provenance::Product
                             : Provenance::Unknown;
  std::vector<Provenance> tags(gens.size(), tag);
  return ConeGenerators(a.kind_ptr(), a.n_slots() + b.n_slots(), a.side(),
                        a.name() + " (x) " + b.name(), std::move(gens),
                        std::move(tags));
}

std::vector<std::size_t> distinct_rays(const std::vector<CoeffTensor>& xs,
                                       double tol) {
  std::vector<std::size_t> keep;
  if (xs.empty()) return keep;
  RayIndex index(xs.front().size(), tol);
  std::vector<double> buf(xs.front().size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double n = xs[i].norm();
    if (n == 0.0) continue;
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] = xs[i][k] / n;
    const std::size_t before = index.size();
    index.insert(buf);
    if (index.size() != before) keep.push_back(i);
  }
  return keep;
}

ConeGenerators permute_cone(const ConeGenerators& cone,
                            std::span<const int> perm) {
  std::vector<CoeffTensor> gens;
  gens.reserve(cone.size());
  for (const auto& g : cone.generators()) gens.push_back(permute_slots(g, perm));
  return ConeGenerators(cone.kind_ptr(), cone.n_slots(), cone.side(),
                        cone.name() + " permuted", std::move(gens), cone.tags());
}

ConeGenerators symmetrize(const ConeGenerators& cone) {
  std::vector<int> perm(static_cast<std::size_t>(cone.n_slots()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<CoeffTensor> candidates;
  std::vector<Provenance> candidate_tags;
  candidates.reserve(cone.size() * perms.size());
  for (std::size_t i = 0; i < cone.size(); ++i)
    for (const auto& p : perms) {
      candidates.push_back(permute_slots(cone.generator(i), p));
      candidate_tags.push_back(cone.tag(i));
    }
  const auto keep = distinct_rays(candidates);
  std::vector<CoeffTensor> gens;
  std::vector<Provenance> tags;
  gens.reserve(keep.size());
  for (std::size_t k : keep) {
    gens.push_back(std::move(candidates[k]));
    tags.push_back(candidate_tags[k]);
  }
  return ConeGenerators(cone.kind_ptr(), cone.n_slots(), cone.side(),
                        "S" + std::to_string(cone.n_slots()) + "." + cone.name(),
                        std::move(gens), std::move(tags));
}

// ----------------------------------------------------------------- pairing

PositivityReport pairwise_positivity(const ConeGenerators& states,
                                     const ConeGenerators& effects,
                                     double tol) {
  if (!same_kind(states.kind_ptr(), effects.kind_ptr()) ||
      states.n_slots() != effects.n_slots())
    throw InputError("pairwise_positivity: shape mismatch between '" +
                     states.name() + "' and '" + effects.name() + "'");
  PositivityReport report;
  const std::size_t ns = states.size();
  const std::size_t ne = effects.size();
  const std::size_t dim = states.dim();
  report.tested = ns * ne;
  if (ns == 0 || ne == 0) return report;

  // metric-applied effect rays, transposed to dim x ne row-major
  std::vector<double> eff(dim * ne);
  const SystemKind& kind = states.kind();
  for (std::size_t j = 0; j < ne; ++j) {
    CoeffTensor e(effects.kind_ptr(), effects.n_slots(),
                  {effects.ray(j).begin(), effects.ray(j).end()}, Side::Effect);
    if (kind.gram_scale != 0.0) {
      e *= std::pow(kind.gram_scale, e.n_slots());
    } else {
      for (int k = 0; k < e.n_slots(); ++k) e = apply_slot_map(e, k, kind.gram);
    }
    for (std::size_t p = 0; p < dim; ++p) eff[p * ne + j] = e[p];
  }
  std::vector<double> values(ns * ne);
  kernels::gemm(ns, dim, ne, states.ray_matrix().data(), eff.data(),
                values.data());

  report.min_normalized = std::numeric_limits<double>::infinity();
  report.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < ne; ++j) {
      const double v = values[i * ne + j];
      const double orig = v * states.scale(i) * effects.scale(j);
      if (orig < report.min_value) report.min_value = orig;
      if (v < report.min_normalized) {
        report.min_normalized = v;
        report.min_state = i;
        report.min_effect = j;
      }
      if (v < -tol) {
        report.holds = false;
        ++report.violation_count;
        if (report.violations.size() < 64) report.violations.push_back({i, j, v});
      }
    }
  return report;
}

}  // namespace gptlab
