// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Tolerances are fixed here and never read from the environment.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gptlab/chsh.hpp"
#include "gptlab/compgraph.hpp"
#include "gptlab/cones.hpp"
#include "gptlab/kernels.hpp"
#include "gptlab/matrix.hpp"
#include "gptlab/models.hpp"
#include "gptlab/swap.hpp"
#include "gptlab/theory.hpp"

using namespace gptlab;

namespace {

constexpr double kTol = 1e-9;        // membership, values, residuals
constexpr double kExact = 1e-12;     // cross-representation and round trips
constexpr double kOstBudget = 180.0;  // seconds for the full stabilizer check

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

int failed = 0;

void run(int id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %2d: %s  %s (%.1fs)\n", id, o.pass ? "PASS" : "FAIL", title, secs);
  for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
  std::fflush(stdout);
  failed += !o.pass;
}

double min_pairing(const std::vector<CoeffTensor>& states, const std::vector<CoeffTensor>& effects,
                   double* max_out = nullptr) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : states)
    for (const auto& e : effects) {
      lo = std::min(lo, pairing(s, e));
      hi = std::max(hi, pairing(s, e));
    }
  if (max_out) *max_out = hi;
  return lo;
}

qmat::Mat random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  qmat::Mat m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = {g(rng), g(rng)};
  return 0.5 * (m + qmat::dagger(m));
}

CoeffTensor random_tensor(const KindPtr& kind, int slots, Side side, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> c(ipow(static_cast<std::size_t>(kind->slot_dim), slots));
  for (auto& x : c) x = g(rng);
  return CoeffTensor(kind, slots, std::move(c), side);
}

// Distinct nonzero outputs of every generator triple.
ConeGenerators all_outputs(const ConeGenerators& outer, const ConeGenerators& middle, SwapMode mode) {
  std::vector<CoeffTensor> outs;
  for (const auto& a : outer.generators())
    for (const auto& b : middle.generators())
      for (const auto& c : outer.generators()) {
        CoeffTensor x = mode == SwapMode::Swap ? entanglement_swap(a, b, c)
                                               : dual_entanglement_swap(a, b, c);
        if (x.norm() > 1e-12 * a.norm() * b.norm() * c.norm()) outs.push_back(std::move(x));
      }
  std::vector<CoeffTensor> kept;
  for (std::size_t k : distinct_rays(outs)) kept.push_back(outs[k]);
  return ConeGenerators(outer.kind_ptr(), 2, outer.side(), "outputs", std::move(kept));
}

}  // namespace

int main() {
  std::printf("kernel table: %s\n", std::string(kernels::active().name).c_str());

  const OstModel ost = build_ost();
  const OstModel quantum = build_ost(1.0);

  run(1, "stretched stabilizer theory passes all ten checks", [&](Outcome& o) {
    ConsistencyOptions opt;
    opt.tol = kTol;
    const ConsistencyReport r = check_consistency(ost.spec, opt);
    o.require(r.consistent, "consistent");
    for (const auto& c : r.checks)
      o.require(c.status == CheckEntry::Status::Pass,
                "check " + std::to_string(c.id) + " " + c.tag + ": " + to_string(c.status));
    const std::size_t all = 52u * 52u * 52u;
    o.require(r.swap_audit && r.swap_audit->tested == all && r.swap_audit->skipped == 0,
              "swap closure exhaustive over 52^3 triples");
    o.require(r.dual_audit && r.dual_audit->tested == all && r.dual_audit->skipped == 0,
              "dual swap closure exhaustive over 52^3 triples");
    o.require(r.seconds <= kOstBudget, "runtime " + fmt("%.2f", r.seconds) + "s within budget");
  });

  run(2, "phase boundary between stretches 1 and 1.2", [&](Outcome& o) {
    ConsistencyOptions opt;
    opt.tol = kTol;
    o.require(check_consistency(quantum.spec, opt).consistent, "stretch 1.0 consistent");
    const OstModel over = build_ost(1.2);
    const ConsistencyReport r = check_consistency(over.spec, opt);
    o.require(!r.consistent, "stretch 1.2 inconsistent");
    o.require(r.first_failure == 2, "first failing check is 2");
    const CheckEntry& c = r.checks[1];
    o.require(c.tag == "# positivity, unipartite", "tag " + c.tag);
    o.require(c.witness.size() == 2 && !c.certificate.empty(), "witness and certificate present");
    if (c.witness.size() == 2) {
      const CoeffTensor ray(over.spec.kind, 1, c.certificate, Side::State);
      o.require(membership(over.spec.D1, ray, kTol).inside, "certificate is a state ray");
      const double v = pairing(ray, over.spec.P1.generator(c.witness[1]));
      o.require(v < -kTol, "witness effect is negative on it: " + fmt("%.6f", v));
    }
    // the rotated-effect pair at angle 3 pi / 4 is where the stretch saturates
    const double direct = min_pairing(over.omega, over.omega_rotated);
    const double want = 0.5 * (1.0 - 1.2 * 1.2 / std::sqrt(2.0));
    o.require(std::abs(direct - want) <= kExact,
              "direct pair value " + fmt("%.12f", direct) + " = (1 - r^2 / sqrt 2) / 2 < 0");
    double hi = 0.0;
    const double lo = min_pairing(ost.omega, ost.omega_rotated, &hi);
    o.require(std::abs(lo) <= kExact && std::abs(hi - 1.0) <= kExact,
              "at the critical stretch pairings span exactly [0, 1]");
  });

  run(3, "theory CHSH values", [&](Outcome& o) {
    const double a = theory_chsh_value(ost.spec).value;
    const double b = theory_chsh_value(quantum.spec).value;
    const double c = theory_chsh_value(build_gbit().product_theory).value;
    o.require(std::abs(a - 4.0) <= kTol, "stretched: " + fmt("%.12f", a));
    o.require(std::abs(b - 2.0 * std::sqrt(2.0)) <= kTol, "quantum stretch: " + fmt("%.12f", b));
    o.require(std::abs(c - 2.0) <= kTol, "gbit products: " + fmt("%.12f", c));
  });

  run(4, "stability under swapping with the link state", [&](Outcome& o) {
    const CoeffTensor link = ost_phi(0, 1);
    const SwapAudit st = stability_probe(link, link.with_side(Side::Effect), ost.spec.D2, kTol);
    o.require(st.stability.has_value(), "one constant for all 52 generators");
    if (st.stability)
      o.require(std::abs(*st.stability - 0.25) <= kTol, "constant " + fmt("%.12f", *st.stability));
    o.require(st.stability_residual <= kTol, "residual " + fmt("%.2e", st.stability_residual));
    double worst = 0.0;
    for (const auto& rho : ost.spec.D2.generators())
      worst = std::max(worst, max_abs_diff(entanglement_swap(link, link.with_side(Side::Effect), rho),
                                           0.25 * rho));
    o.require(worst <= kTol, "max |swap - rho / 4| = " + fmt("%.2e", worst));
    const ConeGenerators outs = all_outputs(ost.spec.D2, ost.spec.P2, SwapMode::Swap);
    o.require(cone_equal(outs, ost.spec.D2, kTol).equal,
              "cone of all " + std::to_string(outs.size()) + " distinct swap outputs equals the state cone");
    const ConeGenerators duals = all_outputs(ost.spec.P2, ost.spec.D2, SwapMode::DualSwap);
    o.require(cone_equal(duals, ost.spec.P2, kTol).equal,
              "cone of all " + std::to_string(duals.size()) + " distinct dual outputs equals the effect cone");
  });

  run(5, "one-round outcome table", [&](Outcome& o) {
    const Strategy& s = ost.strategy;
    const int expected_m[4] = {1, -1, -1, 1};
    const CoeffTensor u = CoeffTensor::unit(ost.spec.kind, 2);
    for (int mu = 0; mu < 4; ++mu) {
      CoeffTensor out = entanglement_swap(s.link_state, s.measurement[static_cast<std::size_t>(mu)], s.link_state);
      const double p = pairing(out, u);
      out *= 1.0 / p;
      const double d_state = max_abs_diff(out, ost_phi(mu, expected_m[mu]));
      const double d_fix = max_abs_diff(apply_slot_map(out, 0, s.corrections[static_cast<std::size_t>(mu)]),
                                        ost_phi(0, 1));
      o.require(std::abs(p - 0.25) <= kTol && d_state <= kTol && d_fix <= kTol,
                "outcome " + std::to_string(mu) + ": probability " + fmt("%.12f", p) +
                    ", state Phi(" + std::to_string(mu) + ", " + std::to_string(expected_m[mu]) +
                    ") off by " + fmt("%.1e", d_state) + ", corrected off by " + fmt("%.1e", d_fix));
    }
  });

  run(6, "iterated game keeps its value", [&](Outcome& o) {
    for (const auto* m : {&ost, &quantum}) {
      const double want = m == &ost ? 4.0 : 2.0 * std::sqrt(2.0);
      const std::string who = m == &ost ? "stretched" : "quantum";
      for (int n = 1; n <= 6; ++n) {
        const GameResult ex = iterate_game_exhaustive(m->strategy, n);
        const GameResult fa = iterate_game_fast(m->strategy, n, kTol);
        o.require(std::abs(ex.beta - want) <= kTol && std::abs(fa.beta - ex.beta) <= kTol &&
                      std::abs(ex.probability_sum - 1.0) <= kTol && !fa.fell_back,
                  who + " n=" + std::to_string(n) + ": exhaustive " + fmt("%.12f", ex.beta) +
                      " over " + std::to_string(ex.table.size()) + " branches, fast " +
                      fmt("%.12f", fa.beta));
      }
      const GameResult far = iterate_game_fast(m->strategy, 50, kTol);
      o.require(std::abs(far.beta - want) <= kTol && !far.fell_back,
                who + " n=50 fast: " + fmt("%.12f", far.beta));
    }
  });

  run(7, "swapping three entangled generators gives a quarter of one", [&](Outcome& o) {
    const auto& phi = ost.phi;
    const auto single = [&](std::size_t a, std::size_t b, std::size_t c) {
      const CoeffTensor out = 4.0 * entanglement_swap(phi[a], phi[b].with_side(Side::Effect), phi[c]);
      double best = INFINITY;
      for (const auto& f : phi) best = std::min(best, max_abs_diff(out, f));
      return best;
    };
    std::mt19937_64 rng(2024);
    double worst_random = 0.0;
    for (int t = 0; t < 200; ++t)
      worst_random = std::max(worst_random, single(rng() % 16, rng() % 16, rng() % 16));
    o.require(worst_random <= kTol, "200 random triples, worst " + fmt("%.1e", worst_random));
    double worst = 0.0;
    for (std::size_t a = 0; a < 16; ++a)
      for (std::size_t b = 0; b < 16; ++b)
        for (std::size_t c = 0; c < 16; ++c) worst = std::max(worst, single(a, b, c));
    o.require(worst <= kTol, "all 4096 triples, worst " + fmt("%.1e", worst));
  });

  run(8, "composite particle", [&](Outcome& o) {
    const CompositeModel c = build_composite();
    o.require(validate_strategy(c.strategy, &c.spec.D1, &c.spec.D2, kTol).valid, "strategy valid");
    const double b1 = iterate_game_exhaustive(c.strategy, 1).beta;
    const double b2 = iterate_game_exhaustive(c.strategy, 2).beta;
    o.require(std::abs(b1 - 4.0) <= kTol, "one round: " + fmt("%.12f", b1));
    o.require(b2 <= 2.0 + kTol, "two rounds: " + fmt("%.12f", b2));
    ConsistencyOptions opt;
    opt.tol = kTol;
    opt.skip_factorizable = true;
    opt.sample = 100000;
    opt.seed = 0;
    const ConsistencyReport r = check_consistency(c.spec, opt);
    o.require(r.consistent, "consistent with factorizable triples skipped");
    std::size_t ent_states = 0, ent_effects = 0;
    for (std::size_t i = 0; i < c.spec.D2.size(); ++i) ent_states += !c.spec.D2.is_product(i);
    for (std::size_t i = 0; i < c.spec.P2.size(); ++i) ent_effects += !c.spec.P2.is_product(i);
    if (r.swap_audit) {
      const std::size_t full = ent_states * ent_effects * ent_states;
      o.require(r.swap_audit->tested - r.swap_audit->sampled == full,
                "swap audit covers all " + std::to_string(full) + " entangled triples (+" +
                    std::to_string(r.swap_audit->sampled) + " sampled)");
    }
    if (r.dual_audit) {
      const std::size_t full = ent_effects * ent_states * ent_effects;
      o.require(r.dual_audit->tested - r.dual_audit->sampled == full,
                "dual audit covers all " + std::to_string(full) + " entangled triples (+" +
                    std::to_string(r.dual_audit->sampled) + " sampled)");
    }
  });

  run(9, "dof graph depth bound", [&](Outcome& o) {
    for (int m = 1; m <= 4; ++m) {
      const GraphScan s = scan_graphs(m);
      o.require(s.depth_bound_violations == 0 && s.max_depth <= m - 1 && s.cycle_mismatches == 0,
                "m=" + std::to_string(m) + ": " + std::to_string(s.graphs) + " graphs, " +
                    std::to_string(s.contradictory) + " contradictory, max depth " +
                    std::to_string(s.max_depth) + ", contradiction <=> closed chain on every graph");
    }
    const GraphClosure c = closure(composite_graph());
    o.require(!c.contradiction && max_chain_depth(c.graph, 64).depth == 1, "two-dof composite graph: depth 1");
    for (int m = 2; m <= 6; ++m)
      o.require(max_chain_depth(closure(ladder_graph(m)).graph, 64).depth == m - 1,
                "ladder on " + std::to_string(m) + " dofs reaches depth " + std::to_string(m - 1));
  });

  run(10, "coefficient and matrix representations agree", [&](Outcome& o) {
    std::mt19937_64 rng(10);
    const auto& D = ost.spec.D2;
    const auto& P = ost.spec.P2;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const CoeffTensor& a = D.generator(rng() % D.size());
      const CoeffTensor& e = P.generator(rng() % P.size());
      const CoeffTensor& b = D.generator(rng() % D.size());
      const CoeffTensor coeff = entanglement_swap(a, e, b);
      const CoeffTensor mat = qmat::pauli_coeffs(
          qmat::swap_matrix(qmat::reconstruct(a), qmat::reconstruct(e), qmat::reconstruct(b)), Side::State);
      worst = std::max(worst, max_abs_diff(coeff, mat));
    }
    o.require(worst <= kExact, "100 random generator triples, worst " + fmt("%.1e", worst));
    double rt = 0.0;
    for (int t = 0; t < 100; ++t) {
      const qmat::Mat h = random_hermitian(4, rng);
      rt = std::max(rt, (qmat::reconstruct(qmat::pauli_coeffs(h, Side::State)) - h).cwiseAbs().maxCoeff());
      const CoeffTensor x = random_tensor(ost.spec.kind, 2, Side::State, rng);
      rt = std::max(rt, max_abs_diff(qmat::pauli_coeffs(qmat::reconstruct(x), Side::State), x));
    }
    o.require(rt <= kExact, "Pauli round trips, worst " + fmt("%.1e", rt));
  });

  run(11, "randomized properties", [&](Outcome& o) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> scale(1e-3, 1e3);
    double bil = 0.0, order = 0.0;
    for (const KindPtr& k : {pauli_qubit_kind(), gbit_kind()}) {
      for (int t = 0; t < 100; ++t) {
        const auto s1 = random_tensor(k, 2, Side::State, rng);
        const auto s2 = random_tensor(k, 2, Side::State, rng);
        const auto e1 = random_tensor(k, 2, Side::Effect, rng);
        const auto e2 = random_tensor(k, 2, Side::Effect, rng);
        bil = std::max(bil, std::abs(pairing(0.3 * s1 - 1.7 * s2, e1) -
                                     (0.3 * pairing(s1, e1) - 1.7 * pairing(s2, e1))));
        bil = std::max(bil, std::abs(pairing(s1, 2.5 * e1 + e2) - (2.5 * pairing(s1, e1) + pairing(s1, e2))));
        const auto rho = random_tensor(k, 3, Side::State, rng);
        const auto ea = random_tensor(k, 1, Side::Effect, rng);
        const auto eb = random_tensor(k, 1, Side::Effect, rng);
        const auto x = contract(contract(rho, ea, {{0, 0}}), eb, {{0, 0}});
        const auto y = contract(contract(rho, eb, {{1, 0}}), ea, {{0, 0}});
        order = std::max(order, max_abs_diff(x, y));
      }
    }
    o.require(bil <= 1e-10, "pairing bilinearity, worst " + fmt("%.1e", bil));
    o.require(order <= 1e-10, "contraction order independence, worst " + fmt("%.1e", order));

    std::size_t flips = 0;
    double res_gap = 0.0;
    for (int t = 0; t < 200; ++t) {
      CoeffTensor x = random_tensor(ost.spec.kind, 2, Side::State, rng);
      if (t % 2 == 0) {
        x = CoeffTensor::zeros(ost.spec.kind, 2, Side::State);
        for (int j = 0; j < 3; ++j) x += scale(rng) * ost.spec.D2.generator(rng() % 52);
      }
      const double lam = scale(rng);
      const auto a = membership(ost.spec.D2, x, kTol);
      const auto b = membership(ost.spec.D2, lam * x, kTol);
      flips += a.inside != b.inside;
      res_gap = std::max(res_gap, std::abs(a.residual - b.residual));
    }
    o.require(flips == 0 && res_gap <= 1e-8,
              "membership scale invariance: " + std::to_string(flips) + " flips, residual gap " + fmt("%.1e", res_gap));

    std::vector<CoeffTensor> seeds;
    for (int t = 0; t < 8; ++t)
      seeds.push_back(tensor_product(ost.spec.D2.generator(rng() % 52), ost.omega[rng() % 6]));
    const ConeGenerators c3(ost.spec.kind, 3, Side::State, "seeds", seeds);
    const ConeGenerators s1 = symmetrize(c3);
    const ConeGenerators s2 = symmetrize(s1);
    bool same = s1.size() == s2.size();
    for (std::size_t i = 0; same && i < s1.size(); ++i) same = max_abs_diff(s1.generator(i), s2.generator(i)) == 0.0;
    o.require(same, "symmetrize idempotent (" + std::to_string(s1.size()) + " generators)");

    const CompositeModel comp = build_composite();
    double comp_gap = 0.0;
    for (const auto* s : {&ost.strategy, &quantum.strategy, &comp.strategy}) {
      CoeffTensor total = CoeffTensor::zeros(s->link_state.kind_ptr(), 2, Side::Effect);
      for (const auto& e : s->measurement) total += e;
      comp_gap = std::max(comp_gap, max_abs_diff(total, CoeffTensor::unit(s->link_state.kind_ptr(), 2)));
    }
    o.require(comp_gap <= kExact, "measurement completeness, worst " + fmt("%.1e", comp_gap));
  });

  std::printf("%s: %d of 11 criteria failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
