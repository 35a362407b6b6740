#include <doctest.h>

#include <cmath>

#include "gptlab/config.hpp"
#include "gptlab/models.hpp"
#include "gptlab/swap.hpp"

using namespace gptlab;

TEST_CASE("stretched stabilizer pieces") {
  const OstModel m = build_ost();
  CHECK(m.omega.size() == 6);
  CHECK(m.omega_rotated.size() == 6);
  CHECK(m.phi.size() == 16);
  // index 4 mu + (m - 1) / 2
  CHECK(max_abs_diff(m.phi[4 * 2 + 3], ost_phi(2, 7)) == 0.0);
  CHECK(max_abs_diff(ost_phi(1, -1), ost_phi(1, 7)) == 0.0);
  // the stretch saturates: some rotated effect is exactly 0 on some state
  double lo = INFINITY;
  for (const auto& s : m.omega)
    for (const auto& e : m.omega_rotated) lo = std::min(lo, pairing(s, e));
  CHECK(std::abs(lo) <= 1e-12);
  const OstModel over = build_ost(1.2);
  double lo2 = INFINITY;
  for (const auto& s : over.omega)
    for (const auto& e : over.omega_rotated) lo2 = std::min(lo2, pairing(s, e));
  CHECK(lo2 == doctest::Approx(0.5 * (1.0 - 1.44 / std::sqrt(2.0))).epsilon(1e-12));
  CHECK_THROWS_AS(build_ost(0.0), InputError);
}

TEST_CASE("one swap round of the stretched strategy") {
  const OstModel m = build_ost();
  const Strategy& s = m.strategy;
  const CoeffTensor u = CoeffTensor::unit(m.spec.kind, 2);
  for (std::size_t b = 0; b < 4; ++b) {
    CoeffTensor out = entanglement_swap(s.link_state, s.measurement[b], s.link_state);
    const double p = pairing(out, u);
    CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
    out *= 1.0 / p;
    CHECK(max_abs_diff(apply_slot_map(out, 0, s.corrections[b]), s.link_state) <= 1e-12);
  }
}

TEST_CASE("gbit boxworld") {
  const GbitModel g = build_gbit();
  CHECK(g.Dmax.size() == 24);
  CHECK(g.Pmax.size() == 24);
  const GbitVerification v = verify_gbit(g);
  CHECK(v.holds);
  CHECK(v.max_box_chsh == doctest::Approx(4.0));
  CHECK(v.max_product_chsh == doctest::Approx(2.0));
  CHECK(v.min_dual_pairing >= -1e-12);
  CHECK(gbit_square_symmetries().size() == 8);
}

TEST_CASE("composite particle") {
  const CompositeModel c = build_composite();
  CHECK(c.kind->slot_dim == 9);
  CHECK(c.spec.D2.size() == 704);
  CHECK(c.spec.P2.size() == 384);
  CHECK(c.spec.D1.size() == 25);
  CHECK(c.spec.P1.size() == 20);
  std::size_t entangled = 0;
  for (std::size_t i = 0; i < c.spec.D2.size(); ++i) entangled += !c.spec.D2.is_product(i);
  CHECK(entangled == 448);
  CHECK(c.strategy.corrections.size() == 16);
  CHECK(validate_strategy(c.strategy, &c.spec.D1, &c.spec.D2).valid);
  CHECK(pairwise_positivity(c.spec.D2, c.spec.P2, 1e-9).holds);
}
