#include <doctest.h>

#include <cmath>
#include <random>

#include "gptlab/config.hpp"
#include "gptlab/cones.hpp"
#include "gptlab/models.hpp"
#include "helpers.hpp"

using namespace gptlab;
using testutil::random_tensor;

namespace {

// The square cone of gbit states.
ConeGenerators gbit_states() { return build_gbit().D1; }

}  // namespace

TEST_CASE("membership in the gbit state cone") {
  const ConeGenerators c = gbit_states();
  const KindPtr& k = gbit_kind();
  CHECK(membership(c, CoeffTensor(k, 1, {1, 0.3, -0.9}, Side::State), 1e-9).inside);
  CHECK(membership(c, CoeffTensor(k, 1, {1, 1, 1}, Side::State), 1e-9).inside);
  const auto out = membership(c, CoeffTensor(k, 1, {1, 1.2, 0}, Side::State), 1e-9);
  CHECK_FALSE(out.inside);
  CHECK(out.certificate_valid);
  CHECK(out.residual > 1e-3);
  // zero is in every cone
  CHECK(membership(c, CoeffTensor::zeros(k, 1, Side::State), 1e-9).inside);
}

TEST_CASE("membership verdicts are scale invariant") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> s(1e-3, 1e3);
  const OstModel ost = build_ost();
  const ConeGenerators& D = ost.spec.D2;
  for (int trial = 0; trial < 60; ++trial) {
    CoeffTensor x = random_tensor(D.kind_ptr(), 2, Side::State, rng);
    if (trial % 2 == 0) {
      // a random member
      x = CoeffTensor::zeros(D.kind_ptr(), 2, Side::State);
      for (int j = 0; j < 4; ++j) x += s(rng) * D.generator(rng() % D.size());
    }
    const double lam = s(rng);
    const auto a = membership(D, x, 1e-9);
    const auto b = membership(D, lam * x, 1e-9);
    CHECK(a.inside == b.inside);
    CHECK(a.residual == doctest::Approx(b.residual).epsilon(1e-6).scale(1e-9));
    if (trial % 2 == 0) CHECK(a.inside);
  }
}

TEST_CASE("certificates separate") {
  std::mt19937_64 rng(42);
  const OstModel ost = build_ost();
  const ConeGenerators& D = ost.spec.D2;
  int outside = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const CoeffTensor x = random_tensor(D.kind_ptr(), 2, Side::State, rng);
    const auto r = membership(D, x, 1e-9);
    if (r.inside) continue;
    ++outside;
    REQUIRE(r.certificate_valid);
    double cx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) cx += r.certificate[i] * x[i];
    CHECK(cx > 0.0);
    for (std::size_t g = 0; g < D.size(); ++g) {
      double cg = 0.0;
      const auto ray = D.ray(g);
      for (std::size_t i = 0; i < ray.size(); ++i) cg += r.certificate[i] * ray[i];
      CHECK(cg <= 1e-9);
    }
  }
  CHECK(outside > 10);
}

TEST_CASE("subset and equality") {
  const GbitModel g = build_gbit();
  const ConeGenerators prod = minimal_tensor_product(g.D1, g.D1);
  CHECK(prod.size() == 16);
  CHECK(cone_subset(prod, g.Dmax, 1e-9).holds);
  const auto back = cone_subset(g.Dmax, prod, 1e-9);
  CHECK_FALSE(back.holds);
  CHECK(back.failures.size() == 8);
  CHECK(cone_equal(g.Dmax, g.Dmax.renamed("copy"), 1e-9).equal);
  CHECK_FALSE(cone_equal(g.Dmax, prod, 1e-9).equal);
}

TEST_CASE("symmetrize is idempotent and permutation closed") {
  const OstModel ost = build_ost();
  std::vector<CoeffTensor> three;
  for (std::size_t i = 0; i < 6; ++i)
    three.push_back(tensor_product(ost.spec.D2.generator(48 + i % 4), ost.omega[i]));
  const ConeGenerators c(ost.spec.kind, 3, Side::State, "c", three);
  const ConeGenerators s1 = symmetrize(c);
  const ConeGenerators s2 = symmetrize(s1);
  CHECK(s1.size() > c.size());
  CHECK(s2.size() == s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i)
    CHECK(max_abs_diff(s1.generator(i), s2.generator(i)) == 0.0);
  const std::vector<int> perm{2, 0, 1};
  CHECK(cone_equal(permute_cone(s1, perm), s1, 1e-9).equal);
}

TEST_CASE("distinct rays ignore scale") {
  const KindPtr& k = gbit_kind();
  std::vector<CoeffTensor> xs{CoeffTensor(k, 1, {1, 1, 0}, Side::State),
                              CoeffTensor(k, 1, {2, 2, 0}, Side::State),
                              CoeffTensor(k, 1, {1, -1, 0}, Side::State),
                              CoeffTensor(k, 1, {1, 1, 1e-3}, Side::State)};
  CHECK(distinct_rays(xs) == std::vector<std::size_t>{0, 2, 3});
}

TEST_CASE("ray index") {
  RayIndex idx(3, 1e-9);
  const double a[3] = {0.6, 0.8, 0.0};
  const double b[3] = {0.6, 0.0, 0.8};
  CHECK(idx.insert(a) == 0);
  CHECK(idx.insert(b) == 1);
  CHECK(idx.insert(a) == 0);
  const double near[3] = {0.6 + 1e-12, 0.8, 0.0};
  CHECK(idx.find(near) == 0);
  const double far[3] = {0.6 + 1e-6, 0.8, 0.0};
  CHECK(idx.find(far) == -1);
}

TEST_CASE("pairwise positivity agrees with direct pairings") {
  const OstModel bad = build_ost(1.2);
  const ConeGenerators& D = bad.spec.D1;
  const ConeGenerators& P = bad.spec.P1;
  const auto r = pairwise_positivity(D, P, 1e-9);
  double direct = INFINITY;
  for (const auto& s : D.generators())
    for (const auto& e : P.generators()) direct = std::min(direct, pairing(s, e));
  CHECK(r.min_value == doctest::Approx(direct).epsilon(1e-12));
  CHECK_FALSE(r.holds);
  CHECK(r.tested == D.size() * P.size());
  const auto good = pairwise_positivity(build_ost().spec.D2, build_ost().spec.P2, 1e-9);
  CHECK(good.holds);
}

TEST_CASE("product detection") {
  const GbitModel g = build_gbit();
  for (std::size_t i = 0; i < g.Dmax.size(); ++i)
    CHECK(is_product_2slot(g.Dmax.generator(i)) == (i < 16));
}
