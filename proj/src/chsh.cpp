#include "gptlab/chsh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gptlab/config.hpp"
#include "gptlab/kernels.hpp"
#include "gptlab/swap.hpp"

namespace gptlab {

CoeffTensor chsh_observable(const ChshSetting& s) {
  const auto side = [](const CoeffTensor& x) { return x.with_side(Side::Effect); };
  const CoeffTensor a0 = side(s.A0), a1 = side(s.A1), b0 = side(s.B0),
                    b1 = side(s.B1);
  if (a0.n_slots() != 1 || a1.n_slots() != 1 || b0.n_slots() != 1 ||
      b1.n_slots() != 1)
    throw InputError("chsh_observable: correlators must have one slot");
  CoeffTensor obs = tensor_product(a0, b0);
  obs += tensor_product(a0, b1);
  obs += tensor_product(a1, b0);
  obs -= tensor_product(a1, b1);
  return obs;
}

double chsh_value(const CoeffTensor& state, const ChshSetting& s) {
  if (state.n_slots() != 2)
    throw InputError("chsh_value: state must have two slots");
  return pairing(state, chsh_observable(s));
}

ChshWitness theory_chsh_value(const TheorySpec& spec) {
  const auto xs = correlators(spec);
  if (xs.empty()) throw InputError("theory_chsh_value: no correlators");
  const auto norm = normalize_states(spec.D2);
  const SystemKind& kind = *spec.kind;
  const auto d = static_cast<std::size_t>(kind.slot_dim);
  const std::size_t nx = xs.size();

  // gx[i] = G x_i, so that <rho, x_i (x) x_j> = (G x_i)^T rho (G x_j).
  std::vector<double> gx(nx * d);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t a = 0; a < d; ++a) {
      double v = 0.0;
      for (std::size_t b = 0; b < d; ++b) v += kind.gram[a * d + b] * xs[i][b];
      gx[i * d + a] = v;
    }

  ChshWitness best;
  best.value = -1.0;
  std::vector<double> tmp(nx * d), t(nx * nx), gxt(d * nx);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t a = 0; a < d; ++a) gxt[a * nx + i] = gx[i * d + a];

  for (std::size_t si = 0; si < norm.states.size(); ++si) {
    const CoeffTensor& rho = norm.states[si];
    kernels::gemm(nx, d, d, gx.data(), rho.data(), tmp.data());
    kernels::gemm(nx, d, nx, tmp.data(), gxt.data(), t.data());
    // value = u(b0) + v(b1) with u = T[a0][.] + T[a1][.], v = T[a0][.] - T[a1][.]
    for (std::size_t a0 = 0; a0 < nx; ++a0)
      for (std::size_t a1 = 0; a1 < nx; ++a1) {
        std::size_t umax = 0, umin = 0, vmax = 0, vmin = 0;
        double uhi = -std::numeric_limits<double>::infinity(), ulo = -uhi;
        double vhi = uhi, vlo = ulo;
        for (std::size_t b = 0; b < nx; ++b) {
          const double u = t[a0 * nx + b] + t[a1 * nx + b];
          const double v = t[a0 * nx + b] - t[a1 * nx + b];
          if (u > uhi) { uhi = u; umax = b; }
          if (u < ulo) { ulo = u; umin = b; }
          if (v > vhi) { vhi = v; vmax = b; }
          if (v < vlo) { vlo = v; vmin = b; }
        }
        const double hi = uhi + vhi;
        const double lo = ulo + vlo;
        if (hi > best.value) {
          best = {hi, hi, norm.source[si], a0, a1, umax, vmax};
        }
        if (-lo > best.value) {
          best = {-lo, lo, norm.source[si], a0, a1, umin, vmin};
        }
      }
  }
  return best;
}

StrategyReport validate_strategy(const Strategy& s, const ConeGenerators* D1,
                                 const ConeGenerators* D2, double tol) {
  StrategyReport r;
  const auto fail = [&](std::string msg) {
    r.valid = false;
    r.problems.push_back(std::move(msg));
  };
  const KindPtr& kind = s.link_state.kind_ptr();
  const auto d = static_cast<std::size_t>(kind->slot_dim);
  if (s.link_state.n_slots() != 2) fail("link state must have two slots");
  if (s.measurement.empty()) fail("measurement has no outcomes");
  if (s.corrections.size() != s.measurement.size())
    fail("need one correction per measurement outcome");

  CoeffTensor sum = CoeffTensor::zeros(kind, 2, Side::Effect);
  for (const auto& e : s.measurement) {
    if (e.n_slots() != 2 || !same_kind(e.kind_ptr(), kind)) {
      fail("measurement effects must be bipartite over the link kind");
      return r;
    }
    sum += e;
  }
  r.completeness_residual = max_abs_diff(sum, CoeffTensor::unit(kind, 2));
  if (r.completeness_residual > 1e-12)
    fail("measurement effects do not sum to the unit effect (max deviation " +
         std::to_string(r.completeness_residual) + ")");

  for (const auto& c : s.corrections)
    if (c.size() != d * d) fail("correction matrices must be slot_dim x slot_dim");

  if (s.group_law) {
    const auto& law = *s.group_law;
    const std::size_t k = s.measurement.size();
    bool shape_ok = law.size() == k;
    for (const auto& row : law) {
      shape_ok = shape_ok && row.size() == k;
      for (int v : row) shape_ok = shape_ok && v >= 0 && static_cast<std::size_t>(v) < k;
    }
    if (!shape_ok) {
      fail("group law must be a k x k table over outcome indices");
    } else {
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
          for (std::size_t c = 0; c < k; ++c)
            if (law[static_cast<std::size_t>(law[a][b])][c] !=
                law[a][static_cast<std::size_t>(law[b][c])]) {
              fail("group law is not associative");
              a = b = c = k;
            }
      bool has_identity = false;
      for (std::size_t e = 0; e < k && !has_identity; ++e) {
        bool ok = true;
        for (std::size_t a = 0; a < k; ++a)
          ok = ok && law[e][a] == static_cast<int>(a) && law[a][e] == static_cast<int>(a);
        has_identity = ok;
      }
      if (!has_identity) fail("group law has no identity");
    }
  }

  if (D1) {
    const auto states = normalize_states(*D1);
    for (const CoeffTensor* x : {&s.setting.A0, &s.setting.A1, &s.setting.B0,
                                 &s.setting.B1})
      for (const auto& st : states.states) {
        const double v = pairing(st, x->with_side(Side::Effect));
        if (v < -1.0 - tol || v > 1.0 + tol) {
          fail("a correlator leaves [-1, 1] on a unipartite state");
          break;
        }
      }
  }
  if (D2 && r.valid) {
    for (std::size_t b = 0; b < s.corrections.size(); ++b) {
      for (const auto& g : D2->generators()) {
        const auto m = membership(*D2, apply_slot_map(g, 0, s.corrections[b]), tol);
        if (!m.inside) {
          fail("correction " + std::to_string(b) + " maps a state generator outside D2");
          break;
        }
      }
    }
  }
  return r;
}

namespace {

CoeffTensor corrected(const Strategy& s, const CoeffTensor& rho,
                      const std::vector<int>& outcomes, int composed) {
  if (composed >= 0)
    return apply_slot_map(rho, 0, s.corrections[static_cast<std::size_t>(composed)]);
  CoeffTensor out = rho;
  for (int b : outcomes)
    out = apply_slot_map(out, 0, s.corrections[static_cast<std::size_t>(b)]);
  return out;
}

}  // namespace

GameResult iterate_game_exhaustive(const Strategy& s, int n, std::size_t cap) {
  if (n < 1) throw InputError("iterate_game: n must be at least 1");
  const std::size_t k = s.measurement.size();
  if (k == 0) throw InputError("iterate_game: empty measurement");
  double branches = std::pow(static_cast<double>(k), n);
  if (branches > static_cast<double>(cap))
    throw InputError("iterate_game: " + std::to_string(k) + "^" +
                     std::to_string(n) + " branches exceed the cap of " +
                     std::to_string(cap));

  GameResult res;
  res.rounds = n;
  if (s.group_law) res.class_probability.assign(k, 0.0);
  const CoeffTensor unit2 = CoeffTensor::unit(s.link_state.kind_ptr(), 2);

  std::vector<int> outcomes;
  std::vector<CoeffTensor> prefix{s.link_state};
  // depth-first so each prefix state is computed once
  const auto visit = [&](auto&& self, int depth) -> void {
    if (depth == n) {
      const CoeffTensor& rho = prefix.back();
      GameBranch br;
      br.outcomes = outcomes;
      br.probability = pairing(rho, unit2);
      if (s.group_law) {
        int g = outcomes.front();
        for (std::size_t i = 1; i < outcomes.size(); ++i)
          g = (*s.group_law)[static_cast<std::size_t>(g)]
                            [static_cast<std::size_t>(outcomes[i])];
        br.composed = g;
        res.class_probability[static_cast<std::size_t>(g)] += br.probability;
      }
      res.probability_sum += br.probability;
      if (!(br.probability > 0.0)) {
        ++res.zero_branches;
      } else {
        CoeffTensor c = corrected(s, rho, outcomes, br.composed);
        c *= 1.0 / br.probability;
        br.raw = chsh_value(c, s.setting);
        br.beta = std::abs(br.raw);
        res.beta += br.probability * br.beta;
      }
      res.table.push_back(std::move(br));
      return;
    }
    for (std::size_t b = 0; b < k; ++b) {
      outcomes.push_back(static_cast<int>(b));
      prefix.push_back(entanglement_swap(prefix.back(), s.measurement[b], s.link_state));
      self(self, depth + 1);
      prefix.pop_back();
      outcomes.pop_back();
    }
  };
  visit(visit, 0);
  if (std::abs(res.probability_sum - 1.0) > 1e-9)
    res.note = "branch probabilities sum to " + std::to_string(res.probability_sum);
  return res;
}

GameResult iterate_game_fast(const Strategy& s, int n, double tol,
                             std::size_t fallback_cap) {
  if (n < 1) throw InputError("iterate_game: n must be at least 1");
  if (!s.group_law) throw InputError("iterate_game_fast: strategy has no group law");
  const auto& law = *s.group_law;
  const std::size_t k = s.measurement.size();
  const CoeffTensor unit2 = CoeffTensor::unit(s.link_state.kind_ptr(), 2);

  // class state of each single outcome, and its probability
  std::vector<CoeffTensor> cls;
  std::vector<double> p1(k);
  for (std::size_t g = 0; g < k; ++g) {
    CoeffTensor out = entanglement_swap(s.link_state, s.measurement[g], s.link_state);
    p1[g] = pairing(out, unit2);
    if (p1[g] > 0.0) out *= 1.0 / p1[g];
    cls.push_back(std::move(out));
  }

  // p(b | g): one more swap from class g lands in class law[g][b]
  std::vector<double> trans(k * k, 0.0);
  std::string problem;
  for (std::size_t g = 0; g < k && problem.empty(); ++g) {
    if (!(p1[g] > 0.0)) continue;
    for (std::size_t b = 0; b < k; ++b) {
      CoeffTensor out = entanglement_swap(cls[g], s.measurement[b], s.link_state);
      const double p = pairing(out, unit2);
      trans[g * k + b] = p;
      if (!(p > 0.0)) continue;
      out *= 1.0 / p;
      const auto h = static_cast<std::size_t>(law[g][b]);
      if (!(p1[h] > 0.0) || max_abs_diff(out, cls[h]) > tol) {
        problem = "outcome " + std::to_string(b) + " from class " +
                  std::to_string(g) + " does not land on class " +
                  std::to_string(h);
        break;
      }
    }
  }
  if (!problem.empty()) {
    GameResult res = iterate_game_exhaustive(s, n, fallback_cap);
    res.fell_back = true;
    res.note = "closure check failed (" + problem + "); computed exhaustively";
    return res;
  }

  std::vector<double> beta_class(k, 0.0);
  for (std::size_t g = 0; g < k; ++g)
    if (p1[g] > 0.0)
      beta_class[g] = std::abs(chsh_value(
          apply_slot_map(cls[g], 0, s.corrections[g]), s.setting));

  std::vector<double> prob = p1;
  for (int round = 1; round < n; ++round) {
    std::vector<double> next(k, 0.0);
    for (std::size_t g = 0; g < k; ++g)
      for (std::size_t b = 0; b < k; ++b)
        next[static_cast<std::size_t>(law[g][b])] += prob[g] * trans[g * k + b];
    prob.swap(next);
  }

  GameResult res;
  res.rounds = n;
  res.class_probability = prob;
  for (std::size_t g = 0; g < k; ++g) {
    res.probability_sum += prob[g];
    res.beta += prob[g] * beta_class[g];
  }
  if (std::abs(res.probability_sum - 1.0) > 1e-9)
    res.note = "class probabilities sum to " + std::to_string(res.probability_sum);
  return res;
}

}  // namespace gptlab
