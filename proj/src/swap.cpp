#include "gptlab/swap.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gptlab/config.hpp"
#include "gptlab/kernels.hpp"

namespace gptlab {
namespace {

void require_bipartite(const CoeffTensor& a, const CoeffTensor& b,
                       const CoeffTensor& c, const char* what) {
  if (a.n_slots() != 2 || b.n_slots() != 2 || c.n_slots() != 2)
    throw InputError(std::string(what) + ": all three inputs need 2 slots");
  if (!same_kind(a.kind_ptr(), b.kind_ptr()) ||
      !same_kind(a.kind_ptr(), c.kind_ptr()))
    throw InputError(std::string(what) + ": kind mismatch");
}

// G * m * G for a d x d matrix m.
std::vector<double> sandwich_gram(const SystemKind& kind,
                                  std::span<const double> m) {
  const auto d = static_cast<std::size_t>(kind.slot_dim);
  std::vector<double> out(m.begin(), m.end());
  if (kind.gram_scale != 0.0) {
    const double s2 = kind.gram_scale * kind.gram_scale;
    for (double& v : out) v *= s2;
    return out;
  }
  std::vector<double> tmp(d * d);
  kernels::gemm(d, d, d, kind.gram.data(), m.data(), tmp.data());
  kernels::gemm(d, d, d, tmp.data(), kind.gram.data(), out.data());
  return out;
}

CoeffTensor chain(const CoeffTensor& outer1, const CoeffTensor& middle,
                  const CoeffTensor& outer2, Side side) {
  const auto d = static_cast<std::size_t>(outer1.slot_dim());
  const auto gmg = sandwich_gram(outer1.kind(), middle.coeffs());
  std::vector<double> x(d * d);
  std::vector<double> out(d * d);
  kernels::gemm(d, d, d, outer1.data(), gmg.data(), x.data());
  kernels::gemm(d, d, d, x.data(), outer2.data(), out.data());
  return CoeffTensor(outer1.kind_ptr(), 2, std::move(out), side);
}

}  // namespace

CoeffTensor entanglement_swap(const CoeffTensor& rho, const CoeffTensor& e,
                              const CoeffTensor& sigma) {
  require_bipartite(rho, e, sigma, "entanglement_swap");
  return chain(rho, e, sigma, Side::State);
}

CoeffTensor dual_entanglement_swap(const CoeffTensor& e, const CoeffTensor& rho,
                                   const CoeffTensor& f) {
  require_bipartite(e, rho, f, "dual_entanglement_swap");
  return chain(e, rho, f, Side::Effect);
}

const char* to_string(SwapMode mode) {
  return mode == SwapMode::Swap ? "swap" : "dual_swap";
}

namespace {

constexpr double kZeroOutput = 1e-12;

struct Triple {
  std::size_t first, middle, last;
};

// One worker's share of an audit.
struct Chunk {
  std::size_t random_begin = 0, random_end = 0;
  std::size_t block_begin = 0, block_end = 0;

  std::size_t tested = 0;
  std::size_t skipped = 0;
  std::size_t sampled = 0;
  std::size_t failure_count = 0;
  std::size_t zero_outputs = 0;
  double max_residual = 0.0;
  std::vector<SwapFailure> failures;
  std::vector<char> entangled_ids;  // by cache id
};

struct Block {
  std::size_t first;
  const std::vector<std::size_t>* middles;
  const std::vector<std::size_t>* lasts;
  bool check_skip;
};

}  // namespace

SwapAuditResult closure_audit(const ConeGenerators& states,
                              const ConeGenerators& effects, SwapMode mode,
                              const AuditOptions& options) {
  if (states.n_slots() != 2 || effects.n_slots() != 2)
    throw InputError("closure_audit: cones must be bipartite");
  if (!same_kind(states.kind_ptr(), effects.kind_ptr()))
    throw InputError("closure_audit: kind mismatch");
  const ConeGenerators& outer = mode == SwapMode::Swap ? states : effects;
  const ConeGenerators& middle = mode == SwapMode::Swap ? effects : states;
  const double tol = options.tol > 0.0 ? options.tol : default_tolerance();
  const std::size_t threads =
      std::max<std::size_t>(1, options.threads ? options.threads : default_threads());
  const auto d = static_cast<std::size_t>(outer.kind().slot_dim);
  const std::size_t dim = d * d;

  SwapAuditResult result;
  result.audit.mode = mode;
  if (outer.empty() || middle.empty()) return result;

  std::vector<std::vector<double>> gmg(middle.size());
  std::vector<double> gmg_norm(middle.size()), outer_norm(outer.size());
  for (std::size_t j = 0; j < middle.size(); ++j) {
    gmg[j] = sandwich_gram(outer.kind(), middle.generator(j).coeffs());
    gmg_norm[j] = std::sqrt(kernels::dot(gmg[j].data(), gmg[j].data(), dim));
  }
  for (std::size_t i = 0; i < outer.size(); ++i)
    outer_norm[i] = outer.generator(i).norm();

  std::vector<std::size_t> all_outer(outer.size()), all_middle(middle.size());
  std::vector<std::size_t> ent_outer, ent_middle;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    all_outer[i] = i;
    if (!outer.is_product(i)) ent_outer.push_back(i);
  }
  for (std::size_t j = 0; j < middle.size(); ++j) {
    all_middle[j] = j;
    if (!middle.is_product(j)) ent_middle.push_back(j);
  }

  std::vector<Triple> random;
  std::vector<Block> blocks;
  if (options.sample == 0) {
    for (std::size_t i = 0; i < outer.size(); ++i)
      blocks.push_back({i, &all_middle, &all_outer, options.skip_factorizable});
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick_outer(0, outer.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_middle(0, middle.size() - 1);
    random.reserve(options.sample);
    for (std::size_t s = 0; s < options.sample; ++s) {
      const std::size_t a = pick_outer(rng);
      const std::size_t b = pick_middle(rng);
      const std::size_t c = pick_outer(rng);
      random.push_back({a, b, c});
    }
    for (std::size_t i : ent_outer)
      blocks.push_back({i, &ent_middle, &ent_outer, false});
  }

  const auto skippable = [&](std::size_t i, std::size_t j, std::size_t k) {
    return middle.is_product(j) || (outer.is_product(i) && outer.is_product(k));
  };

  const std::size_t n_chunks = threads;
  std::vector<Chunk> chunks(n_chunks);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    chunks[c].random_begin = random.size() * c / n_chunks;
    chunks[c].random_end = random.size() * (c + 1) / n_chunks;
    chunks[c].block_begin = blocks.size() * c / n_chunks;
    chunks[c].block_end = blocks.size() * (c + 1) / n_chunks;
  }
  std::vector<MembershipCache> caches;
  caches.reserve(n_chunks);
  for (std::size_t c = 0; c < n_chunks; ++c) caches.emplace_back(outer, tol);

  parallel_for(n_chunks, threads, [&](std::size_t c) {
    Chunk& ch = chunks[c];
    MembershipCache& cache = caches[c];
    std::vector<double> x(dim), out(dim);
    const auto record = [&](std::size_t i, std::size_t j, std::size_t k,
                            bool all_entangled) {
      ++ch.tested;
      kernels::gemm(d, d, d, x.data(), outer.generator(k).data(), out.data());
      // Outputs at rounding level relative to the inputs are exact zeros
      // (orthogonal pairings); their direction is noise.
      const double scale = outer_norm[i] * gmg_norm[j] * outer_norm[k];
      if (std::sqrt(kernels::dot(out.data(), out.data(), dim)) <=
          kZeroOutput * scale) {
        ++ch.zero_outputs;
        return;
      }
      const MembershipResult& r = cache.query(out);
      if (options.collect_entangled_outputs && all_entangled &&
          cache.last_id() >= 0) {
        ch.entangled_ids.resize(cache.distinct(), 0);
        ch.entangled_ids[static_cast<std::size_t>(cache.last_id())] = 1;
      }
      if (r.inside) {
        ch.max_residual = std::max(ch.max_residual, r.residual);
        return;
      }
      ++ch.failure_count;
      if (ch.failures.size() < 64)
        ch.failures.push_back(
            {i, j, k, r.residual, r.certificate, r.certificate_valid});
    };
    for (std::size_t t = ch.random_begin; t < ch.random_end; ++t) {
      const Triple& tr = random[t];
      if (options.skip_factorizable && skippable(tr.first, tr.middle, tr.last)) {
        ++ch.skipped;
        continue;
      }
      kernels::gemm(d, d, d, outer.generator(tr.first).data(),
                    gmg[tr.middle].data(), x.data());
      ++ch.sampled;
      record(tr.first, tr.middle, tr.last,
             !outer.is_product(tr.first) && !middle.is_product(tr.middle) &&
                 !outer.is_product(tr.last));
    }
    for (std::size_t b = ch.block_begin; b < ch.block_end; ++b) {
      const Block& blk = blocks[b];
      const std::size_t i = blk.first;
      for (std::size_t j : *blk.middles) {
        if (blk.check_skip && middle.is_product(j)) {
          ch.skipped += blk.lasts->size();
          continue;
        }
        kernels::gemm(d, d, d, outer.generator(i).data(), gmg[j].data(),
                      x.data());
        const bool ent_ij = !outer.is_product(i) && !middle.is_product(j);
        for (std::size_t k : *blk.lasts) {
          if (blk.check_skip && outer.is_product(i) && outer.is_product(k)) {
            ++ch.skipped;
            continue;
          }
          record(i, j, k, ent_ij && !outer.is_product(k));
        }
      }
    }
  });

  SwapAudit& audit = result.audit;
  RayIndex merged(dim, 1e-9);
  RayIndex merged_entangled(dim, 1e-9);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    const Chunk& ch = chunks[c];
    audit.tested += ch.tested;
    audit.skipped += ch.skipped;
    audit.sampled += ch.sampled;
    audit.failure_count += ch.failure_count;
    audit.zero_outputs += ch.zero_outputs;
    audit.max_residual = std::max(audit.max_residual, ch.max_residual);
    for (const auto& f : ch.failures)
      if (audit.failures.size() < 64) audit.failures.push_back(f);
    const MembershipCache& cache = caches[c];
    for (std::size_t id = 0; id < cache.distinct(); ++id) {
      merged.insert(cache.ray(id));
      if (id < ch.entangled_ids.size() && ch.entangled_ids[id]) {
        const std::size_t before = merged_entangled.size();
        merged_entangled.insert(cache.ray(id));
        if (merged_entangled.size() != before) {
          const auto ray = cache.ray(id);
          result.entangled_outputs.emplace_back(
              outer.kind_ptr(), 2, std::vector<double>(ray.begin(), ray.end()),
              outer.side());
        }
      }
    }
  }
  audit.distinct_outputs = merged.size();
  return result;
}

SwapAudit stability_probe(const CoeffTensor& fixed_state,
                          const CoeffTensor& fixed_effect,
                          const ConeGenerators& states, double tol) {
  SwapAudit audit;
  audit.mode = SwapMode::Swap;
  std::optional<double> common;
  bool proportional = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const CoeffTensor& rho = states.generator(i);
    const CoeffTensor out = entanglement_swap(fixed_state, fixed_effect, rho);
    const double rr = kernels::dot(rho.data(), rho.data(), rho.size());
    const double c = kernels::dot(out.data(), rho.data(), rho.size()) / rr;
    CoeffTensor diff = out - c * rho;
    const double res = diff.norm() / std::sqrt(rr);
    ++audit.tested;
    worst = std::max(worst, res);
    if (res > tol) {
      proportional = false;
      ++audit.failure_count;
      if (audit.failures.size() < 64) audit.failures.push_back({0, 0, i, res, {}, false});
      continue;
    }
    if (!common) {
      common = c;
    } else if (std::abs(c - *common) > tol * std::max(1.0, std::abs(*common))) {
      proportional = false;
      ++audit.failure_count;
      if (audit.failures.size() < 64)
        audit.failures.push_back({0, 0, i, std::abs(c - *common), {}, false});
    }
  }
  audit.stability_residual = worst;
  if (proportional) audit.stability = common;
  return audit;
}

}  // namespace gptlab
