#include "gptlab/theory.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "gptlab/config.hpp"
#include "gptlab/nnls.hpp"

namespace gptlab {
namespace {

// Marginals below this fraction of the parent's norm count as zero.
constexpr double kZeroRel = 1e-12;

ConeGenerators dedup_cone(const KindPtr& kind, int n_slots, Side side,
                          std::string name, std::vector<CoeffTensor> cands) {
  const auto keep = distinct_rays(cands);
  std::vector<CoeffTensor> gens;
  gens.reserve(keep.size());
  for (std::size_t k : keep) gens.push_back(std::move(cands[k]));
  return ConeGenerators(kind, n_slots, side, std::move(name), std::move(gens));
}

}  // namespace

Unipartite derive_unipartite(const ConeGenerators& P2,
                             const ConeGenerators& D2) {
  if (P2.n_slots() != 2 || D2.n_slots() != 2)
    throw InputError("derive_unipartite: cones must be bipartite");
  if (!same_kind(P2.kind_ptr(), D2.kind_ptr()))
    throw InputError("derive_unipartite: kind mismatch");
  const KindPtr& kind = D2.kind_ptr();
  const CoeffTensor unit = CoeffTensor::unit(kind, 1);

  std::vector<CoeffTensor> d1;
  for (const auto& rho : D2.generators()) {
    const double scale = rho.norm();
    for (int slot : {1, 0}) {
      CoeffTensor m = contract(rho, unit, {{slot, 0}});
      if (m.norm() > kZeroRel * scale) d1.push_back(m.with_side(Side::State));
    }
  }
  Unipartite out;
  out.D1 = dedup_cone(kind, 1, Side::State, "D1", std::move(d1));

  std::vector<CoeffTensor> p1;
  for (const auto& e : P2.generators()) {
    const double scale = e.norm();
    for (const auto& s : out.D1.generators()) {
      for (int slot : {0, 1}) {
        CoeffTensor m = contract(s, e, {{0, slot}});
        if (m.norm() > kZeroRel * scale * s.norm())
          p1.push_back(m.with_side(Side::Effect));
      }
    }
  }
  out.P1 = dedup_cone(kind, 1, Side::Effect, "P1", std::move(p1));
  return out;
}

TheorySpec make_theory(std::string name, ConeGenerators P2, ConeGenerators D2,
                       std::optional<std::vector<CoeffTensor>> effect_space) {
  TheorySpec spec;
  spec.name = std::move(name);
  spec.kind = D2.kind_ptr();
  spec.P2 = std::move(P2);
  spec.D2 = std::move(D2);
  spec.effect_space = std::move(effect_space);
  auto uni = derive_unipartite(spec.P2, spec.D2);
  spec.D1 = std::move(uni.D1);
  spec.P1 = std::move(uni.P1);
  spec.derived = true;
  return spec;
}

const char* to_string(CheckEntry::Status s) {
  switch (s) {
    case CheckEntry::Status::Pass:
      return "pass";
    case CheckEntry::Status::Fail:
      return "fail";
    case CheckEntry::Status::Skipped:
      return "skipped";
    case CheckEntry::Status::NotRun:
      break;
  }
  return "not-run";
}

CoeffTensor negation(const CoeffTensor& e) {
  return CoeffTensor::unit(e.kind_ptr(), e.n_slots()) - e;
}

EffectSpaceReport verify_effect_space(const TheorySpec& spec, double tol) {
  EffectSpaceReport r;
  if (!spec.effect_space) return r;
  for (std::size_t i = 0; i < spec.effect_space->size(); ++i) {
    const CoeffTensor& g = (*spec.effect_space)[i];
    const auto in = membership(spec.P1, g, tol);
    const auto neg = membership(spec.P1, negation(g), tol);
    r.worst_residual = std::max({r.worst_residual, in.residual, neg.residual});
    if (!in.inside) r.missing.push_back(i);
    if (!neg.inside) r.negation_missing.push_back(i);
  }
  r.holds = r.missing.empty() && r.negation_missing.empty();
  return r;
}

EffectSpaceReport negation_hull_closure(const TheorySpec& spec, double tol) {
  EffectSpaceReport r;
  if (!spec.effect_space || spec.effect_space->empty()) return r;
  const auto& gens = *spec.effect_space;
  const auto dim = static_cast<Eigen::Index>(gens.front().size());
  Eigen::MatrixXd lifted(dim + 1, static_cast<Eigen::Index>(gens.size()));
  for (std::size_t j = 0; j < gens.size(); ++j) {
    for (Eigen::Index k = 0; k < dim; ++k)
      lifted(k, static_cast<Eigen::Index>(j)) = gens[j][static_cast<std::size_t>(k)];
    lifted(dim, static_cast<Eigen::Index>(j)) = 1.0;
  }
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const CoeffTensor neg = negation(gens[i]);
    Eigen::VectorXd b(dim + 1);
    for (Eigen::Index k = 0; k < dim; ++k) b(k) = neg[static_cast<std::size_t>(k)];
    b(dim) = 1.0;
    NnlsOptions opts;
    opts.target_residual = 1e-3 * tol * b.norm();
    const auto sol = solve_nnls(lifted, b, opts);
    const double rel = sol.residual_norm / b.norm();
    r.worst_residual = std::max(r.worst_residual, rel);
    if (rel > tol) r.negation_missing.push_back(i);
  }
  r.holds = r.negation_missing.empty();
  return r;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x == 0.0 ? 0.0 : x);
  return buf;
}

// On failure the certificate is the offending state ray: a member of the
// state cone on which the witness effect is negative.
void fill_positivity(CheckEntry& c, const PositivityReport& p,
                     const ConeGenerators& states) {
  c.value = p.min_normalized;
  c.status = p.holds ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
  c.detail = std::to_string(p.tested) + " pairs, min normalized pairing " +
             num(p.min_normalized);
  if (!p.holds) {
    c.witness = {p.violations.front().state, p.violations.front().effect};
    const auto ray = states.ray(p.violations.front().state);
    c.certificate.assign(ray.begin(), ray.end());
    c.value = p.violations.front().value;
    c.detail += ", " + std::to_string(p.violation_count) + " negative";
  }
}

void fill_subset(CheckEntry& c, const SubsetReport& s, const std::string& what) {
  c.status = s.holds ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
  c.detail = what + ": " + std::to_string(s.tested) + " generators tested";
  if (!s.holds) {
    c.witness = {s.failures.front().index};
    c.certificate = s.failures.front().certificate;
    c.value = s.failures.front().residual;
    c.detail += ", " + std::to_string(s.failures.size()) + " outside";
  }
}

void fill_equal(CheckEntry& c, const EqualReport& e) {
  c.status = e.equal ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
  c.detail = "mutual inclusion over " +
             std::to_string(e.a_in_b.tested + e.b_in_a.tested) + " generators";
  if (!e.equal) {
    const auto& s = e.a_in_b.holds ? e.b_in_a : e.a_in_b;
    c.witness = {s.failures.front().index};
    c.certificate = s.failures.front().certificate;
    c.value = s.failures.front().residual;
    c.detail += e.a_in_b.holds ? ", swapped cone not contained"
                               : ", cone not contained in its swap";
  }
}

void fill_audit(CheckEntry& c, const SwapAudit& a) {
  c.status = a.holds() ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
  c.value = a.max_residual;
  c.detail = std::to_string(a.tested) + " triples tested";
  if (a.sampled) c.detail += " (" + std::to_string(a.sampled) + " sampled)";
  if (a.skipped) c.detail += ", " + std::to_string(a.skipped) + " skipped as factorizable";
  c.detail += ", " + std::to_string(a.distinct_outputs) + " distinct outputs";
  if (!a.holds()) {
    const auto& f = a.failures.front();
    c.witness = {f.first, f.middle, f.last};
    c.certificate = f.certificate;
    c.value = f.residual;
    c.detail += ", " + std::to_string(a.failure_count) + " outside";
  }
}

}  // namespace

ConsistencyReport check_consistency(const TheorySpec& spec,
                                    const ConsistencyOptions& options) {
  if (!spec.derived) throw InputError("check_consistency: spec not derived");
  const double tol = options.tol > 0.0 ? options.tol : default_tolerance();
  const auto t_start = Clock::now();
  ConsistencyReport report;

  const std::array<std::pair<const char*, const char*>, 10> names{{
      {"unit effect in P1", "# Axiom 3(a)"},
      {"<D1, P1> >= 0", "# positivity, unipartite"},
      {"<D, P> >= 0", "# positivity, bipartite"},
      {"P invariant under slot swap", "# Axiom 6, bipartite"},
      {"D invariant under slot swap", "# Axiom 6, bipartite"},
      {"P1 (x) P1 in P", "# Axiom 3(b), unipartite"},
      {"D1 (x) D1 in D", "# Axiom 4(b), unipartite"},
      {"D|P|D in D", "# Axiom 5(b), bipartite"},
      {"P|D|P in P", "# Axiom 5(a), bipartite"},
      {"effect space g, 1 - g in P1", "# E = P ∩ ¬P"},
  }};
  for (int i = 0; i < 10; ++i) {
    CheckEntry c;
    c.id = i + 1;
    c.name = names[static_cast<std::size_t>(i)].first;
    c.tag = names[static_cast<std::size_t>(i)].second;
    report.checks.push_back(std::move(c));
  }

  AuditOptions audit_opts;
  audit_opts.tol = tol;
  audit_opts.skip_factorizable = options.skip_factorizable;
  audit_opts.sample = options.sample;
  audit_opts.seed = options.seed;
  audit_opts.threads = options.threads;

  const std::array<int, 2> swap_perm{1, 0};
  const std::array<std::function<void(CheckEntry&)>, 10> steps{{
      [&](CheckEntry& c) {
        const auto m = membership(spec.P1, CoeffTensor::unit(spec.kind, 1), tol);
        c.status = m.inside ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
        c.value = m.residual;
        c.detail = "residual " + num(m.residual);
        if (!m.inside) c.certificate = m.certificate;
      },
      [&](CheckEntry& c) {
        fill_positivity(c, pairwise_positivity(spec.D1, spec.P1, tol), spec.D1);
      },
      [&](CheckEntry& c) {
        fill_positivity(c, pairwise_positivity(spec.D2, spec.P2, tol), spec.D2);
      },
      [&](CheckEntry& c) {
        fill_equal(c, cone_equal(spec.P2, permute_cone(spec.P2, swap_perm), tol));
      },
      [&](CheckEntry& c) {
        fill_equal(c, cone_equal(spec.D2, permute_cone(spec.D2, swap_perm), tol));
      },
      [&](CheckEntry& c) {
        fill_subset(c, cone_subset(minimal_tensor_product(spec.P1, spec.P1),
                                   spec.P2, tol),
                    "P1 (x) P1");
      },
      [&](CheckEntry& c) {
        fill_subset(c, cone_subset(minimal_tensor_product(spec.D1, spec.D1),
                                   spec.D2, tol),
                    "D1 (x) D1");
      },
      [&](CheckEntry& c) {
        auto r = closure_audit(spec.D2, spec.P2, SwapMode::Swap, audit_opts);
        fill_audit(c, r.audit);
        report.swap_audit = std::move(r.audit);
      },
      [&](CheckEntry& c) {
        auto r = closure_audit(spec.D2, spec.P2, SwapMode::DualSwap, audit_opts);
        fill_audit(c, r.audit);
        report.dual_audit = std::move(r.audit);
      },
      [&](CheckEntry& c) {
        if (!spec.effect_space) {
          c.status = CheckEntry::Status::Skipped;
          c.detail = "no effect space given";
          return;
        }
        const auto r = verify_effect_space(spec, tol);
        c.status = r.holds ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
        c.value = r.worst_residual;
        c.detail = std::to_string(spec.effect_space->size()) +
                   " generators and their negations";
        if (!r.holds) {
          c.witness = r.missing.empty() ? r.negation_missing : r.missing;
          c.detail += r.missing.empty() ? ", a negation lies outside P1"
                                        : ", a generator lies outside P1";
        }
      },
  }};

  bool ok = true;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    CheckEntry& c = report.checks[i];
    const auto t0 = Clock::now();
    steps[i](c);
    c.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (!c.passed()) {
      if (ok) report.first_failure = c.id;
      ok = false;
      if (!options.run_all) break;
    }
  }
  report.consistent = ok;
  report.seconds = std::chrono::duration<double>(Clock::now() - t_start).count();
  return report;
}

ExtendedCones extend_n(const TheorySpec& spec, int n,
                       std::size_t generator_cap) {
  if (!spec.derived) throw InputError("extend_n: spec not derived");
  if (n < 1) throw InputError("extend_n: n must be at least 1");
  if (n == 1) return {spec.P1, spec.D1};
  if (n == 2) return {spec.P2, spec.D2};

  const auto build = [&](const ConeGenerators& uni, const ConeGenerators& bi,
                         const std::string& label) {
    double count = 1.0;
    for (int k = 0; k < n / 2; ++k) count *= static_cast<double>(bi.size());
    if (n % 2) count *= static_cast<double>(uni.size());
    double perms = 1.0;
    for (int k = 2; k <= n; ++k) perms *= k;
    if (count * perms > static_cast<double>(generator_cap))
      throw InputError("extend_n: " + std::to_string(count * perms) +
                       " candidate generators exceed the cap of " +
                       std::to_string(generator_cap));
    ConeGenerators acc = n % 2 ? uni : bi;
    for (int k = n % 2 ? 0 : 1; k < n / 2; ++k)
      acc = minimal_tensor_product(acc, bi);
    return symmetrize(acc).renamed(label + std::to_string(n));
  };
  return {build(spec.P1, spec.P2, "P"), build(spec.D1, spec.D2, "D")};
}

std::vector<CoeffTensor> correlators(const TheorySpec& spec) {
  if (!spec.effect_space)
    throw InputError("correlators: theory has no effect space");
  std::vector<CoeffTensor> out;
  out.reserve(spec.effect_space->size());
  const CoeffTensor unit = CoeffTensor::unit(spec.kind, 1);
  for (const auto& g : *spec.effect_space) out.push_back(2.0 * g - unit);
  return out;
}

NormalizedStates normalize_states(const ConeGenerators& cone) {
  NormalizedStates out;
  const CoeffTensor unit = CoeffTensor::unit(cone.kind_ptr(), cone.n_slots());
  const double unit_norm = unit.norm();
  for (std::size_t i = 0; i < cone.size(); ++i) {
    const CoeffTensor& g = cone.generator(i);
    const double p = pairing(g, unit);
    if (!(std::abs(p) > kZeroRel * g.norm() * unit_norm)) {
      out.excluded.push_back(i);
      continue;
    }
    out.states.push_back((1.0 / p) * g);
    out.source.push_back(i);
  }
  return out;
}

}  // namespace gptlab
