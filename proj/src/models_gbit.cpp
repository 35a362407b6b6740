#include "gptlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gptlab/config.hpp"

namespace gptlab {
namespace {

// carries the state square (1, s1, s2) onto twice the effect diamond
constexpr double kSquareToDiamond[9] = {1, 0, 0, 0, 0.5, 0.5, 0, 0.5, -0.5};

CoeffTensor box(const double c[2][2]) {
  std::vector<double> m(9, 0.0);
  m[0] = 1.0;
  m[4] = c[0][0];
  m[5] = c[0][1];
  m[7] = c[1][0];
  m[8] = c[1][1];
  return CoeffTensor(gbit_kind(), 2, std::move(m), Side::State);
}

}  // namespace

std::vector<std::vector<double>> gbit_square_symmetries() {
  std::vector<std::vector<double>> out;
  for (int swap = 0; swap < 2; ++swap)
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) {
        std::vector<double> m(9, 0.0);
        m[0] = 1.0;
        if (swap) {
          m[1 * 3 + 2] = s1;
          m[2 * 3 + 1] = s2;
        } else {
          m[1 * 3 + 1] = s1;
          m[2 * 3 + 2] = s2;
        }
        out.push_back(std::move(m));
      }
  return out;
}

GbitModel build_gbit() {
  GbitModel g;
  const KindPtr& kind = gbit_kind();
  for (double a : {1.0, -1.0})
    for (double b : {1.0, -1.0})
      g.states.emplace_back(kind, 1, std::vector<double>{1, a, b}, Side::State);
  g.effects.emplace_back(kind, 1, std::vector<double>{0.5, 0.5, 0}, Side::Effect);
  g.effects.emplace_back(kind, 1, std::vector<double>{0.5, -0.5, 0}, Side::Effect);
  g.effects.emplace_back(kind, 1, std::vector<double>{0.5, 0, 0.5}, Side::Effect);
  g.effects.emplace_back(kind, 1, std::vector<double>{0.5, 0, -0.5}, Side::Effect);
  g.effects.push_back(CoeffTensor::unit(kind, 1));

  g.D1 = ConeGenerators(kind, 1, Side::State, "gbit states", g.states);
  g.P1 = ConeGenerators(kind, 1, Side::Effect, "gbit effects", g.effects);

  std::vector<CoeffTensor> dmax;
  std::vector<Provenance> tags;
  for (const auto& a : g.states)
    for (const auto& b : g.states) {
      dmax.push_back(tensor_product(a, b));
      tags.push_back(Provenance::Product);
    }
  for (int pattern = 0; pattern < 16; ++pattern) {
    double c[2][2];
    int minus = 0;
    for (int k = 0; k < 4; ++k) {
      const bool neg = (pattern >> k) & 1;
      c[k / 2][k % 2] = neg ? -1.0 : 1.0;
      minus += neg;
    }
    if (minus % 2 == 0) continue;
    dmax.push_back(box(c));
    tags.push_back(Provenance::Entangled);
  }
  g.Dmax = ConeGenerators(kind, 2, Side::State, "gbit max states", dmax, tags);

  std::vector<CoeffTensor> pmax;
  for (const auto& x : dmax) {
    CoeffTensor y = apply_slot_map(x, 0, kSquareToDiamond);
    y = apply_slot_map(y, 1, kSquareToDiamond);
    pmax.push_back(y.with_side(Side::Effect));
  }
  g.Pmax = ConeGenerators(kind, 2, Side::Effect, "gbit max effects", pmax, tags);

  const ConeGenerators D2 = minimal_tensor_product(g.D1, g.D1).renamed("D");
  const ConeGenerators P2 = minimal_tensor_product(g.P1, g.P1).renamed("P");
  std::vector<CoeffTensor> es;
  es.push_back(CoeffTensor::zeros(kind, 1, Side::Effect));
  es.push_back(CoeffTensor::unit(kind, 1));
  for (int i = 0; i < 4; ++i) es.push_back(g.effects[static_cast<std::size_t>(i)]);
  g.product_theory = make_theory("gbit-product", P2, D2, std::move(es));

  const CoeffTensor unit = CoeffTensor::unit(kind, 1);
  g.setting.A0 = 2.0 * g.effects[0] - unit;
  g.setting.A1 = 2.0 * g.effects[2] - unit;
  g.setting.B0 = g.setting.A0;
  g.setting.B1 = g.setting.A1;
  return g;
}

GbitVerification verify_gbit(const GbitModel& m) {
  GbitVerification v;
  const auto fail = [&](std::string msg) {
    v.holds = false;
    v.problems.push_back(std::move(msg));
  };
  const ConeGenerators product_effects = minimal_tensor_product(m.P1, m.P1);
  const ConeGenerators product_states = minimal_tensor_product(m.D1, m.D1);
  const auto dual = pairwise_positivity(m.Dmax, product_effects, 1e-12);
  v.min_dual_pairing = dual.min_value;
  if (!dual.holds) fail("a box vertex pairs negatively with a product effect");
  const auto eff = pairwise_positivity(product_states, m.Pmax, 1e-12);
  v.min_effect_pairing = eff.min_value;
  if (!eff.holds) fail("a maximal effect pairs negatively with a product state");

  const CoeffTensor unit2 = CoeffTensor::unit(m.D1.kind_ptr(), 2);
  for (std::size_t i = 0; i < m.Dmax.size(); ++i) {
    const CoeffTensor& x = m.Dmax.generator(i);
    const double norm = pairing(x, unit2);
    if (std::abs(norm - 1.0) > 1e-12) fail("a box vertex is not normalized");
    const double val = std::abs(chsh_value(x, m.setting));
    if (m.Dmax.is_product(i))
      v.max_product_chsh = std::max(v.max_product_chsh, val);
    else
      v.max_box_chsh = std::max(v.max_box_chsh, val);
  }
  if (std::abs(v.max_box_chsh - 4.0) > 1e-12) fail("box vertices do not reach CHSH 4");
  if (v.max_product_chsh > 2.0 + 1e-12) fail("a product vertex exceeds CHSH 2");

  // extremality: no vertex is a conic combination of the others
  for (std::size_t i = 0; i < m.Dmax.size(); ++i) {
    std::vector<CoeffTensor> rest;
    for (std::size_t j = 0; j < m.Dmax.size(); ++j)
      if (j != i) rest.push_back(m.Dmax.generator(j));
    const ConeGenerators others(m.Dmax.kind_ptr(), 2, Side::State, "rest",
                                std::move(rest));
    if (membership(others, m.Dmax.generator(i), 1e-9).inside) {
      fail("box vertex " + std::to_string(i) + " is not extremal");
      break;
    }
  }
  return v;
}

}  // namespace gptlab
