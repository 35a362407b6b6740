#include <doctest.h>

#include <algorithm>
#include <random>

#include "gptlab/config.hpp"
#include "gptlab/tensor.hpp"
#include "helpers.hpp"

using namespace gptlab;
using testutil::random_tensor;

TEST_CASE("layout is slot-major") {
  const KindPtr& k = gbit_kind();
  std::vector<double> c(27);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<double>(i);
  const CoeffTensor x(k, 3, c, Side::State);
  CHECK(x.at({1, 2, 0}) == 1 * 9 + 2 * 3 + 0);
  CHECK(x.at({2, 0, 1}) == 19);
}

TEST_CASE("pairing is bilinear") {
  std::mt19937_64 rng(21);
  for (const KindPtr& kind : {pauli_qubit_kind(), gbit_kind()}) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto s1 = random_tensor(kind, 2, Side::State, rng);
      const auto s2 = random_tensor(kind, 2, Side::State, rng);
      const auto e1 = random_tensor(kind, 2, Side::Effect, rng);
      const auto e2 = random_tensor(kind, 2, Side::Effect, rng);
      const double a = 0.7, b = -1.3;
      const double lhs = pairing(a * s1 + b * s2, e1);
      const double rhs = a * pairing(s1, e1) + b * pairing(s2, e1);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
      const double lhs2 = pairing(s1, a * e1 + b * e2);
      const double rhs2 = a * pairing(s1, e1) + b * pairing(s1, e2);
      CHECK(lhs2 == doctest::Approx(rhs2).epsilon(1e-12));
    }
  }
}

TEST_CASE("pairing of products factorizes") {
  std::mt19937_64 rng(22);
  const KindPtr& kind = pauli_qubit_kind();
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_tensor(kind, 1, Side::State, rng);
    const auto b = random_tensor(kind, 1, Side::State, rng);
    const auto e = random_tensor(kind, 1, Side::Effect, rng);
    const auto f = random_tensor(kind, 1, Side::Effect, rng);
    CHECK(pairing(tensor_product(a, b), tensor_product(e, f)) ==
          doctest::Approx(pairing(a, e) * pairing(b, f)).epsilon(1e-12));
  }
  // with gram 2I the unit pairs to 1 against (1/2, 0, 0, 0)
  const CoeffTensor half(kind, 1, {0.5, 0, 0, 0}, Side::State);
  CHECK(pairing(half, CoeffTensor::unit(kind, 1)) == doctest::Approx(1.0));
}

TEST_CASE("contraction order does not matter") {
  std::mt19937_64 rng(23);
  for (const KindPtr& kind : {pauli_qubit_kind(), gbit_kind()}) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto rho = random_tensor(kind, 3, Side::State, rng);
      const auto ea = random_tensor(kind, 1, Side::Effect, rng);
      const auto eb = random_tensor(kind, 1, Side::Effect, rng);
      const CoeffTensor first_a = contract(contract(rho, ea, {{0, 0}}), eb, {{0, 0}});
      const CoeffTensor first_b = contract(contract(rho, eb, {{1, 0}}), ea, {{0, 0}});
      const CoeffTensor joint = contract(rho, tensor_product(ea, eb), {{0, 0}, {1, 1}});
      REQUIRE(first_a.n_slots() == 1);
      CHECK(max_abs_diff(first_a, first_b) <= 1e-12);
      CHECK(max_abs_diff(first_a, joint) <= 1e-12);
      // full contraction equals the pairing
      const auto ec = random_tensor(kind, 1, Side::Effect, rng);
      const CoeffTensor full = contract(rho, tensor_product(tensor_product(ea, eb), ec),
                                        {{2, 2}, {0, 0}, {1, 1}});
      REQUIRE(full.is_scalar());
      CHECK(full.scalar_value() ==
            doctest::Approx(pairing(rho, tensor_product(tensor_product(ea, eb), ec))).epsilon(1e-12));
    }
  }
}

TEST_CASE("contraction result kinds") {
  std::mt19937_64 rng(24);
  const KindPtr& k = gbit_kind();
  const auto rho = random_tensor(k, 2, Side::State, rng);
  const auto e = random_tensor(k, 2, Side::Effect, rng);
  CHECK(contract(rho, e, {{0, 1}}).n_slots() == 2);
  CHECK(contract(rho, e, {{0, 1}}).side() == Side::State);
  const auto s1 = random_tensor(k, 1, Side::State, rng);
  CHECK(contract(s1, e, {{0, 0}}).side() == Side::Effect);
  CHECK_THROWS_AS(contract(rho, e, {{0, 0}, {1, 0}}), InputError);
  CHECK_THROWS_AS(contract(rho, e, {{2, 0}}), InputError);
}

TEST_CASE("slot permutations compose and invert") {
  std::mt19937_64 rng(25);
  const auto x = random_tensor(gbit_kind(), 4, Side::State, rng);
  const std::vector<int> p{2, 0, 3, 1};
  const auto inv = inverse_permutation(p);
  CHECK(max_abs_diff(permute_slots(permute_slots(x, p), inv), x) == 0.0);
  // slot k of the result holds slot p[k]
  CHECK(permute_slots(x, p).at({1, 2, 0, 1}) == x.at({2, 1, 1, 0}));
  CHECK_THROWS_AS(permute_slots(x, std::vector<int>{0, 0, 1, 2}), InputError);
}

TEST_CASE("products and slot maps") {
  std::mt19937_64 rng(26);
  const KindPtr& k = pauli_qubit_kind();
  const auto a = random_tensor(k, 1, Side::State, rng);
  const auto b = random_tensor(k, 2, Side::State, rng);
  const auto ab = tensor_product(a, b);
  CHECK(ab.n_slots() == 3);
  CHECK(ab.at({1, 2, 3}) == doctest::Approx(a[1] * b.at({2, 3})));
  const std::vector<double> id{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  CHECK(max_abs_diff(apply_slot_map(ab, 1, id), ab) == 0.0);
  CHECK_THROWS_AS(tensor_product(a, random_tensor(gbit_kind(), 1, Side::State, rng)), InputError);
}

TEST_CASE("kinds") {
  CHECK(pauli_qubit_kind()->gram_scale == 2.0);
  CHECK(gbit_kind()->gram_scale == 1.0);
  const KindPtr f = fused_kind(gbit_kind(), gbit_kind(), "pair");
  CHECK(f->slot_dim == 9);
  CHECK(f->unit[0] == 1.0);
  CHECK(std::count(f->unit.begin(), f->unit.end(), 0.0) == 8);
  CHECK_THROWS_AS(make_kind(2, {1, 2, 3, 4}, {1, 0}, "asym"), InputError);
  CHECK_THROWS_AS(make_kind(2, {1, 1, 1, 1}, {1, 0}, "singular"), InputError);
  CHECK_THROWS_AS(CoeffTensor(gbit_kind(), 2, std::vector<double>(8), Side::State), InputError);
}
