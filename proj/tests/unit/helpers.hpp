#pragma once

#include <random>
#include <vector>

#include "gptlab/tensor.hpp"

namespace testutil {

inline gptlab::CoeffTensor random_tensor(const gptlab::KindPtr& kind, int slots,
                                         gptlab::Side side, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> c(gptlab::ipow(static_cast<std::size_t>(kind->slot_dim), slots));
  for (auto& x : c) x = g(rng);
  return gptlab::CoeffTensor(kind, slots, std::move(c), side);
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace testutil
