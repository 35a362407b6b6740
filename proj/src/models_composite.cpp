#include "gptlab/models.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "gptlab/config.hpp"
#include "gptlab/swap.hpp"

namespace gptlab {
namespace {

// Gbit tensors are assembled slot by slot and then read as fused tensors:
// the 4-slot gbit index (1A, 2A, 1B, 2B) and the 2-slot fused index
// (A, B) coincide because dof 1 is the major digit of a fused slot.
CoeffTensor fuse(const KindPtr& kind, const CoeffTensor& x, Side side) {
  const int slots = x.n_slots() / 2;
  return CoeffTensor(kind, slots, {x.coeffs().begin(), x.coeffs().end()}, side);
}

CoeffTensor arrange(const CoeffTensor& x, std::array<int, 4> perm) {
  return permute_slots(x, perm);
}

CoeffTensor gbit_box(double c00, double c01, double c10, double c11) {
  return CoeffTensor(gbit_kind(), 2, {1, 0, 0, 0, c00, c01, 0, c10, c11},
                     Side::State);
}

constexpr double kSquareToDiamond[9] = {1, 0, 0, 0, 0.5, 0.5, 0, 0.5, -0.5};

CoeffTensor box_effect(const CoeffTensor& box) {
  CoeffTensor y = apply_slot_map(box, 0, kSquareToDiamond);
  return apply_slot_map(y, 1, kSquareToDiamond).with_side(Side::Effect);
}

}  // namespace

CompositeModel build_composite() {
  const GbitModel g = build_gbit();
  const KindPtr& gk = gbit_kind();
  CompositeModel out;
  out.kind = fused_kind(gk, gk, "gbit-pair");
  const KindPtr& kind = out.kind;

  // states: boxes on (1A,1B) with local gbit states on 2A and 2B, and boxes
  // on (1A,2B) together with boxes on (2A,1B)
  std::vector<CoeffTensor> d;
  std::vector<Provenance> d_tags;
  for (std::size_t i = 0; i < g.Dmax.size(); ++i)
    for (const auto& s : g.states)
      for (const auto& t : g.states) {
        const CoeffTensor x = tensor_product(tensor_product(g.Dmax.generator(i), s), t);
        d.push_back(fuse(kind, arrange(x, {0, 2, 1, 3}), Side::State));
        d_tags.push_back(g.Dmax.is_product(i) ? Provenance::Product
                                               : Provenance::Entangled);
      }
  for (std::size_t i = 0; i < g.Dmax.size(); ++i)
    for (std::size_t j = 0; j < g.Dmax.size(); ++j) {
      const CoeffTensor x = tensor_product(g.Dmax.generator(i), g.Dmax.generator(j));
      d.push_back(fuse(kind, arrange(x, {0, 2, 3, 1}), Side::State));
      d_tags.push_back(g.Dmax.is_product(i) && g.Dmax.is_product(j)
                           ? Provenance::Product
                           : Provenance::Entangled);
    }
  std::vector<CoeffTensor> d_gens;
  std::vector<Provenance> d_kept_tags;
  for (std::size_t k : distinct_rays(d)) {
    d_gens.push_back(d[k]);
    d_kept_tags.push_back(d_tags[k]);
  }

  // effects: extremal gbit effects on 1A and 1B, maximal effects on (2A,2B)
  std::vector<CoeffTensor> p;
  std::vector<Provenance> p_tags;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (std::size_t k = 0; k < g.Pmax.size(); ++k) {
        const CoeffTensor x = tensor_product(
            tensor_product(g.effects[static_cast<std::size_t>(a)],
                           g.effects[static_cast<std::size_t>(b)]),
            g.Pmax.generator(k));
        p.push_back(fuse(kind, arrange(x, {0, 2, 1, 3}), Side::Effect));
        p_tags.push_back(g.Pmax.tag(k));
      }

  // effect space: 0, 1, e (x) 1, 1 (x) e, e (x) f over extremal e, f
  const CoeffTensor u1 = CoeffTensor::unit(gk, 1);
  std::vector<CoeffTensor> es;
  es.push_back(CoeffTensor::zeros(kind, 1, Side::Effect));
  es.push_back(CoeffTensor::unit(kind, 1));
  for (int a = 0; a < 4; ++a)
    es.push_back(fuse(kind, tensor_product(g.effects[static_cast<std::size_t>(a)], u1), Side::Effect));
  for (int a = 0; a < 4; ++a)
    es.push_back(fuse(kind, tensor_product(u1, g.effects[static_cast<std::size_t>(a)]), Side::Effect));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      es.push_back(fuse(kind,
                        tensor_product(g.effects[static_cast<std::size_t>(a)],
                                       g.effects[static_cast<std::size_t>(b)]),
                        Side::Effect));

  out.spec = make_theory(
      "composite",
      ConeGenerators(kind, 2, Side::Effect, "Pc", std::move(p), std::move(p_tags)),
      ConeGenerators(kind, 2, Side::State, "Dc", std::move(d_gens),
                     std::move(d_kept_tags)),
      std::move(es));

  // Strategy: each link joins 1 of one particle to 2 of the next and back.
  Strategy& s = out.strategy;
  const CoeffTensor pr = gbit_box(1, 1, 1, -1);
  s.link_state = fuse(kind, arrange(tensor_product(pr, pr), {0, 2, 3, 1}), Side::State);

  // Bob reads dof 1 of both particles in the x basis and projects dof 2 of
  // the pair onto four box effects summing to the unit.
  const std::array<CoeffTensor, 4> boxes{
      gbit_box(1, 1, 1, -1), gbit_box(-1, -1, -1, 1), gbit_box(-1, 1, 1, 1),
      gbit_box(1, -1, -1, -1)};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (const auto& bx : boxes) {
        CoeffTensor x = tensor_product(
            tensor_product(g.effects[static_cast<std::size_t>(a)],
                           g.effects[static_cast<std::size_t>(b)]),
            box_effect(bx));
        x *= 0.25;
        s.measurement.push_back(fuse(kind, arrange(x, {0, 2, 1, 3}), Side::Effect));
      }

  const CoeffTensor x_corr = fuse(kind, tensor_product(2.0 * g.effects[0] - u1, u1), Side::Effect);
  const CoeffTensor y_corr = fuse(kind, tensor_product(2.0 * g.effects[2] - u1, u1), Side::Effect);
  s.setting = {x_corr, y_corr, x_corr, y_corr};

  // For each outcome, a square symmetry on Alice's dof 1 that turns the
  // conditional box into the one the setting scores at +4.
  const CoeffTensor unit2 = CoeffTensor::unit(kind, 2);
  const auto syms = gbit_square_symmetries();
  std::vector<double> id3{1, 0, 0, 0, 1, 0, 0, 0, 1};
  for (const auto& e : s.measurement) {
    CoeffTensor st = entanglement_swap(s.link_state, e, s.link_state);
    const double prob = pairing(st, unit2);
    if (prob > 0.0) st *= 1.0 / prob;
    std::vector<double> best_map;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& sym : syms) {
      std::vector<double> map(81, 0.0);
      for (int i1 = 0; i1 < 3; ++i1)
        for (int i2 = 0; i2 < 3; ++i2)
          for (int j1 = 0; j1 < 3; ++j1)
            for (int j2 = 0; j2 < 3; ++j2)
              map[static_cast<std::size_t>((i1 * 3 + i2) * 9 + j1 * 3 + j2)] =
                  sym[static_cast<std::size_t>(i1 * 3 + j1)] *
                  id3[static_cast<std::size_t>(i2 * 3 + j2)];
      const double v = chsh_value(apply_slot_map(st, 0, map), s.setting);
      if (v > best + 1e-12) {
        best = v;
        best_map = std::move(map);
      }
    }
    s.corrections.push_back(std::move(best_map));
  }
  return out;
}

}  // namespace gptlab
