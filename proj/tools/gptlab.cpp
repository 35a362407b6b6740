// gptlab: consistency checks, n-partite extension, CHSH values, the iterated
// game and degree-of-freedom graphs from the command line.
//
// Exit codes: 0 ok, 1 inconsistent / contradiction / failed self-check,
// 2 usage or input error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gptlab/chsh.hpp"
#include "gptlab/compgraph.hpp"
#include "gptlab/config.hpp"
#include "gptlab/io.hpp"
#include "gptlab/models.hpp"
#include "gptlab/swap.hpp"
#include "gptlab/theory.hpp"

using namespace gptlab;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Common {
  double tol = 0.0;
  std::size_t sample = 0;
  bool skip_factorizable = false;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool json = false;
};

ConsistencyOptions consistency_options(const Common& c, bool run_all) {
  ConsistencyOptions o;
  o.tol = c.tol;
  o.sample = c.sample;
  o.skip_factorizable = c.skip_factorizable;
  o.seed = c.seed;
  o.threads = c.threads;
  o.run_all = run_all;
  return o;
}

void print_report(const TheorySpec& spec, const ConsistencyReport& r) {
  std::printf("theory %s: %zu P2 / %zu D2 generators, derived %zu P1 / %zu D1\n",
              spec.name.c_str(), spec.P2.size(), spec.D2.size(), spec.P1.size(), spec.D1.size());
  for (const auto& c : r.checks) {
    std::printf("  %-8s %2d %-34s %s\n", to_string(c.status), c.id, c.name.c_str(), c.tag.c_str());
    if (!c.detail.empty()) std::printf("           %s\n", c.detail.c_str());
    if (c.status == CheckEntry::Status::Fail && !c.witness.empty()) {
      std::printf("           witness:");
      for (auto w : c.witness) std::printf(" %zu", w);
      std::printf("\n");
    }
  }
  for (const auto* a : {&r.swap_audit, &r.dual_audit})
    if (*a)
      std::printf("  %s audit: %zu tested (%zu sampled, %zu zero), %zu skipped, %zu distinct outputs, %zu failures\n",
                  to_string((*a)->mode), (*a)->tested, (*a)->sampled, (*a)->zero_outputs,
                  (*a)->skipped, (*a)->distinct_outputs, (*a)->failure_count);
  if (r.consistent)
    std::printf("consistent (%.2fs)\n", r.seconds);
  else
    std::printf("inconsistent: check %d failed (%.2fs)\n", r.first_failure, r.seconds);
}

int cmd_check(const std::string& file, const Common& c, bool run_all) {
  const TheoryFile tf = read_theory(file);
  const ConsistencyReport r = check_consistency(tf.spec, consistency_options(c, run_all));
  if (c.json)
    std::cout << dump(report_to_json(tf.spec, r));
  else
    print_report(tf.spec, r);
  return r.consistent ? kOk : kFail;
}

// Every adjacent transposition maps the extended cone onto itself.
bool permutation_invariant(const ConeGenerators& cone) {
  const int n = cone.n_slots();
  for (int k = 0; k + 1 < n; ++k) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(k + 1)]);
    for (const auto& g : cone.generators()) {
      CoeffTensor x = permute_slots(g, perm);
      const double norm = x.norm();
      if (norm == 0.0) continue;
      x *= 1.0 / norm;
      if (cone.find_ray(x.coeffs()) < 0) return false;
    }
  }
  return true;
}

int cmd_extend(const std::string& file, int n, const std::string& out, const Common& c) {
  const TheoryFile tf = read_theory(file);
  const ConsistencyReport r = check_consistency(tf.spec, consistency_options(c, false));
  if (!r.consistent) {
    std::fprintf(stderr, "extend: theory is inconsistent (check %d failed)\n", r.first_failure);
    return kFail;
  }
  const ExtendedCones cones = extend_n(tf.spec, n);
  const bool inv = n < 2 || (permutation_invariant(cones.P) && permutation_invariant(cones.D));
  std::fprintf(stderr, "extend: n = %d, %zu effect and %zu state generators; permutation invariance %s\n",
               n, cones.P.size(), cones.D.size(), inv ? "ok" : "FAILED");
  const std::string text = dump(extended_to_json(tf.spec, n, cones));
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text(out, text);
  return inv ? kOk : kFail;
}

int cmd_chsh(const std::string& file, const Common& c) {
  const TheoryFile tf = read_theory(file);
  if (!tf.spec.effect_space) {
    std::fprintf(stderr,
                 "chsh: %s has no \"effect_space\"; add the generators of the unipartite "
                 "effect space (e.g. 0, the unit and the extremal effects)\n",
                 file.c_str());
    return kUsage;
  }
  const ChshWitness w = theory_chsh_value(tf.spec);
  if (c.json) {
    std::cout << dump(chsh_to_json(tf.spec, w));
  } else {
    std::printf("CHSH value: %.9f\n", w.value);
    std::printf("witness: state D2[%zu], correlators A0=%zu A1=%zu B0=%zu B1=%zu (signed %.9f)\n",
                w.state, w.a0, w.a1, w.b0, w.b1, w.raw);
  }
  return kOk;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9f", x);
  return buf;
}

int cmd_iterate(const std::string& file, int rounds, const std::string& mode, const Common& c) {
  const TheoryFile tf = read_theory(file);
  if (!tf.strategy) {
    std::fprintf(stderr, "iterate: %s has no \"strategy\" block\n", file.c_str());
    return kUsage;
  }
  const Strategy& s = *tf.strategy;
  const double tol = c.tol > 0.0 ? c.tol : default_tolerance();
  const StrategyReport sr = validate_strategy(s, &tf.spec.D1, &tf.spec.D2, tol);
  const bool run_ex = mode != "fast";
  const bool run_fast = mode != "exhaustive";
  Json j;
  j["command"] = "iterate";
  j["theory"] = tf.spec.name;
  j["mode"] = mode;
  j["strategy_valid"] = sr.valid;
  j["problems"] = sr.problems;
  j["rounds"] = Json::array();
  bool agree = true;
  if (!c.json) {
    std::printf("strategy %s\n", sr.valid ? "valid" : "INVALID");
    for (const auto& p : sr.problems) std::printf("  %s\n", p.c_str());
    std::printf("%6s %18s %18s\n", "rounds", run_ex ? "beta (exhaustive)" : "", run_fast ? "beta (fast)" : "");
  }
  for (int n = 1; n <= rounds; ++n) {
    Json row;
    row["n"] = n;
    double be = NAN, bf = NAN;
    // in "both" mode the exhaustive side stops once the branch count passes its cap
    const bool ex_here = run_ex && (mode == "exhaustive" ||
                                    std::pow(static_cast<double>(s.measurement.size()), n) <=
                                        static_cast<double>(std::size_t{1} << 20));
    if (ex_here) {
      const GameResult g = iterate_game_exhaustive(s, n);
      be = g.beta;
      row["exhaustive"] = game_to_json(g);
    }
    if (run_fast) {
      const GameResult g = iterate_game_fast(s, n, tol);
      bf = g.beta;
      row["fast"] = game_to_json(g);
    }
    if (ex_here && run_fast) {
      const bool ok = std::abs(be - bf) <= tol;
      row["agree"] = ok;
      agree = agree && ok;
    }
    if (!c.json) {
      std::printf("%6d %18s %18s%s\n", n, ex_here ? fmt(be).c_str() : "",
                  run_fast ? fmt(bf).c_str() : "",
                  ex_here && run_fast && std::abs(be - bf) > tol ? "  DISAGREE" : "");
    }
    j["rounds"].push_back(std::move(row));
  }
  j["agree"] = agree;
  if (c.json)
    std::cout << dump(j);
  else if (run_ex && run_fast)
    std::printf("exhaustive and fast paths %s\n", agree ? "agree" : "DISAGREE");
  return sr.valid && agree ? kOk : kFail;
}

int cmd_graph(const std::string& file, int limit, const Common& c) {
  const SwapGraph g = read_graph(file);
  const GraphValidation v = validate(g);
  Json j;
  j["command"] = "graph";
  j["m"] = g.m;
  j["valid"] = v.valid;
  j["violations"] = v.violations;
  if (!v.valid) {
    if (c.json) {
      std::cout << dump(j);
    } else {
      std::printf("invalid graph:\n");
      for (const auto& s : v.violations) std::printf("  %s\n", s.c_str());
    }
    return kFail;
  }
  const GraphClosure cl = closure(g);
  const bool cycle = has_self_reproducing_chain(g);
  j["contradiction"] = cl.contradiction;
  Json conflicts = Json::array();
  for (const auto& [a, b] : cl.conflicts) conflicts.push_back({a + 1, b + 1});
  j["conflicts"] = std::move(conflicts);
  j["closure"] = graph_to_json(cl.graph);
  j["self_reproducing_chain"] = cycle;
  const std::size_t added = cl.graph.E.size() + cl.graph.F.size() - g.E.size() - g.F.size();
  if (!cl.contradiction) {
    const ChainDepth d = max_chain_depth(cl.graph, limit);
    j["depth"] = d.depth;
    j["at_limit"] = d.at_limit;
  } else {
    j["depth"] = nullptr;
    j["at_limit"] = nullptr;
  }
  if (c.json) {
    std::cout << dump(j);
  } else {
    std::printf("graph on %d dofs: valid, |E| = %zu, |F| = %zu\n", g.m, g.E.size(), g.F.size());
    std::printf("closure: %zu edges added in %d passes\n", added, cl.passes);
    if (cl.contradiction) {
      std::printf("contradiction: %s", cl.conflicts.size() == 1 ? "edge" : "edges");
      for (const auto& [a, b] : cl.conflicts) std::printf(" (v%d, w%d)", a + 1, b + 1);
      std::printf(" %s in both E and F%s\n", cl.conflicts.size() == 1 ? "lands" : "land",
                  cycle ? "; a chain reproduces its own first edge" : "");
    } else {
      const ChainDepth d = max_chain_depth(cl.graph, limit);
      std::printf("max chain depth: %s%d\n", d.at_limit ? ">= " : "", d.depth);
    }
  }
  return cl.contradiction ? kFail : kOk;
}

// Built-in models as theory files.
TheoryFile builtin(const std::string& name, double r) {
  TheoryFile tf;
  if (name == "ost") {
    OstModel m = build_ost(r > 0.0 ? r : ost_critical_radius());
    tf.spec = std::move(m.spec);
    tf.strategy = std::move(m.strategy);
  } else if (name == "gbit") {
    tf.spec = build_gbit().product_theory;
  } else if (name == "composite") {
    CompositeModel m = build_composite();
    tf.spec = std::move(m.spec);
    tf.strategy = std::move(m.strategy);
  } else {
    throw InputError("unknown model \"" + name + "\" (ost, gbit, composite)");
  }
  return tf;
}

int cmd_export(const std::string& name, double r, const std::string& out) {
  const TheoryFile tf = builtin(name, r);
  const std::string text =
      dump(theory_to_json(tf.spec, tf.strategy ? &*tf.strategy : nullptr));
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text(out, text);
  return kOk;
}

struct Tally {
  int passed = 0;
  int failed = 0;
  void add(bool ok, const std::string& what) {
    std::printf("  %s  %s\n", ok ? "pass" : "FAIL", what.c_str());
    (ok ? passed : failed)++;
  }
};

int cmd_demo(const std::string& name, const std::string& dir, const Common& c) {
  const TheoryFile tf = builtin(name, 0.0);
  std::filesystem::create_directories(dir);
  const std::string path = (std::filesystem::path(dir) / (name + ".json")).string();
  const std::string text = dump(theory_to_json(tf.spec, tf.strategy ? &*tf.strategy : nullptr));
  write_text(path, text);
  std::printf("wrote %s\n", path.c_str());

  Tally t;
  const TheoryFile back = read_theory(path);
  t.add(dump(theory_to_json(back.spec, back.strategy ? &*back.strategy : nullptr)) == text,
        "export -> import -> export is byte-stable");

  Common opts = c;
  if (name == "composite") {
    // the full audit runs to tens of millions of triples; entangled ones are
    // always kept when sampling
    opts.skip_factorizable = true;
    if (opts.sample == 0) opts.sample = 100000;
  }
  const ConsistencyReport r = check_consistency(back.spec, consistency_options(opts, false));
  t.add(r.consistent, "consistency check (" + std::to_string(r.checks.size()) + " checks)");

  const ChshWitness w = theory_chsh_value(back.spec);
  const double want = name == "gbit" ? 2.0 : 4.0;
  if (name != "composite")
    t.add(std::abs(w.value - want) <= 1e-9, "theory CHSH value " + std::to_string(w.value));

  if (back.strategy) {
    const Strategy& s = *back.strategy;
    t.add(validate_strategy(s, &back.spec.D1, &back.spec.D2).valid, "strategy is valid");
    if (name == "ost") {
      for (int n = 1; n <= 6; ++n) {
        const double ex = iterate_game_exhaustive(s, n).beta;
        const double fa = iterate_game_fast(s, n).beta;
        t.add(std::abs(ex - 4.0) <= 1e-9 && std::abs(fa - ex) <= 1e-9,
              "iterated game, " + std::to_string(n) + " rounds: beta " + std::to_string(ex));
      }
      const SwapAudit st = stability_probe(s.link_state, ost_phi(0, 1).with_side(Side::Effect),
                                           back.spec.D2);
      t.add(st.stability && std::abs(*st.stability - 0.25) <= 1e-9,
            "swapping with the link state scales every state by 1/4");
    } else {
      const double b1 = iterate_game_exhaustive(s, 1).beta;
      const double b2 = iterate_game_exhaustive(s, 2).beta;
      t.add(std::abs(b1 - 4.0) <= 1e-9, "one round: beta " + std::to_string(b1));
      t.add(b2 <= 2.0 + 1e-9, "two rounds: beta " + std::to_string(b2));
      const std::string gpath = (std::filesystem::path(dir) / "composite_m2.json").string();
      write_text(gpath, dump(graph_to_json(composite_graph())));
      const SwapGraph g = read_graph(gpath);
      const GraphClosure cl = closure(g);
      t.add(!cl.contradiction && max_chain_depth(cl.graph, 16).depth == 1,
            "dof graph " + gpath + ": depth 1");
    }
  } else {
    const GbitVerification v = verify_gbit(build_gbit());
    t.add(v.holds, "box vertices reach CHSH 4, products stay at 2");
  }
  std::printf("%s: %d passed, %d failed\n", name.c_str(), t.passed, t.failed);
  return t.failed == 0 ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consistency checks and CHSH games for bipartite theories of states and effects"};
  app.require_subcommand(1);
  Common c;
  bool run_all = false;
  int n = 2;
  int rounds = 6;
  int limit = 64;
  double r = 0.0;
  std::string file, out, mode = "both", name, dir = ".";

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", c.tol, "relative tolerance (default 1e-9 or GPTLAB_TOL)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--threads", c.threads, "worker threads (default: all cores)");
    sub->add_flag("--json", c.json, "machine-readable output");
  };
  const auto add_audit = [&](CLI::App* sub) {
    sub->add_option("--sample", c.sample, "random triples per swap audit (0: all)");
    sub->add_flag("--skip-factorizable", c.skip_factorizable,
                  "skip triples whose output factorizes into members");
    sub->add_option("--seed", c.seed, "seed for sampling")->capture_default_str();
  };

  auto* check = app.add_subcommand("check", "run the consistency checks");
  check->add_option("file", file, "theory file")->required();
  check->add_flag("--all", run_all, "keep going after the first failing check");
  add_common(check);
  add_audit(check);

  auto* extend = app.add_subcommand("extend", "n-partite effect and state cones");
  extend->add_option("file", file, "theory file")->required();
  extend->add_option("-n", n, "number of parties")->check(CLI::Range(1, 64));
  extend->add_option("--out", out, "output file (default stdout)");
  add_common(extend);
  add_audit(extend);

  auto* chsh = app.add_subcommand("chsh", "largest CHSH value over states and effects");
  chsh->add_option("file", file, "theory file")->required();
  add_common(chsh);

  auto* iterate = app.add_subcommand("iterate", "iterated CHSH game with the file's strategy");
  iterate->add_option("file", file, "theory file with a strategy block")->required();
  iterate->add_option("--rounds", rounds, "largest number of swap rounds")->check(CLI::Range(1, 10000));
  iterate->add_option("--mode", mode, "exhaustive, fast or both")
      ->check(CLI::IsMember({"exhaustive", "fast", "both"}));
  add_common(iterate);

  auto* graph = app.add_subcommand("graph", "validate, close and measure a dof graph");
  graph->add_option("file", file, "graph file")->required();
  graph->add_option("--limit", limit, "largest depth explored")->check(CLI::Range(1, 1000000));
  add_common(graph);

  auto* demo = app.add_subcommand("demo", "write a built-in model and run its checks");
  demo->add_option("name", name, "ost, gbit or composite")->required()
      ->check(CLI::IsMember({"ost", "gbit", "composite"}));
  demo->add_option("--dir", dir, "where to write files");
  add_common(demo);
  add_audit(demo);

  auto* exp = app.add_subcommand("export", "write a built-in model as a theory file");
  exp->add_option("name", name, "ost, gbit or composite")->required()
      ->check(CLI::IsMember({"ost", "gbit", "composite"}));
  exp->add_option("-r", r, "stretch for ost (default 2^(1/4))")->check(CLI::PositiveNumber);
  exp->add_option("--out", out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (c.threads > 0) set_default_threads(c.threads);
  if (c.tol > 0.0) set_default_tolerance(c.tol);

  try {
    if (check->parsed()) return cmd_check(file, c, run_all);
    if (extend->parsed()) return cmd_extend(file, n, out, c);
    if (chsh->parsed()) return cmd_chsh(file, c);
    if (iterate->parsed()) return cmd_iterate(file, rounds, mode, c);
    if (graph->parsed()) return cmd_graph(file, limit, c);
    if (demo->parsed()) return cmd_demo(name, dir, c);
    if (exp->parsed()) return cmd_export(name, r, out);
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
