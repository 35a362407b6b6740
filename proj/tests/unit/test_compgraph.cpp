#include <doctest.h>

#include "gptlab/compgraph.hpp"

using namespace gptlab;

namespace {

bool includes(const SwapGraph& big, const SwapGraph& small) {
  for (const auto& e : small.E)
    if (!big.E.count(e)) return false;
  for (const auto& e : small.F)
    if (!big.F.count(e)) return false;
  return true;
}

bool symmetric(const std::set<Edge>& s) {
  for (const auto& [i, j] : s)
    if (!s.count({j, i})) return false;
  return true;
}

}  // namespace

TEST_CASE("validation") {
  SwapGraph ok{2, {{0, 1}, {1, 0}}, {{1, 1}}};
  CHECK(validate(ok).valid);
  SwapGraph both{2, {{0, 1}, {1, 0}}, {{0, 1}, {1, 0}}};
  const auto r = validate(both);
  CHECK_FALSE(r.valid);
  CHECK(r.violations.size() == 2);
  CHECK(r.violations[0].find("rule 2") != std::string::npos);
  SwapGraph half{2, {{0, 1}}, {}};
  const auto h = validate(half);
  CHECK_FALSE(h.valid);
  CHECK(h.violations[0].find("rule 1") != std::string::npos);
  SwapGraph range{2, {{0, 2}, {2, 0}}, {}};
  CHECK_FALSE(validate(range).valid);
}

TEST_CASE("two-dof composite graph") {
  const SwapGraph g = composite_graph();
  CHECK(validate(g).valid);
  const GraphClosure c = closure(g);
  CHECK_FALSE(c.contradiction);
  CHECK(c.graph == g);
  const ChainDepth d = max_chain_depth(c.graph, 10);
  CHECK(d.depth == 1);
  CHECK_FALSE(d.at_limit);
}

TEST_CASE("empty F changes nothing") {
  const SwapGraph g{3, {{0, 1}, {1, 0}, {2, 2}}, {}};
  const GraphClosure c = closure(g);
  CHECK(c.graph == g);
  CHECK(max_chain_depth(c.graph, 10).depth == 0);
}

TEST_CASE("closed alternating cycles contradict") {
  // E(v1,w2) F(v2,w2) E(v2,w1) concatenates to (v1,w1), which is already in F
  const SwapGraph g{2, {{0, 1}, {1, 0}}, {{0, 0}, {1, 1}}};
  CHECK(validate(g).valid);
  CHECK(has_self_reproducing_chain(g));
  const GraphClosure c = closure(g);
  CHECK(c.contradiction);
  CHECK_FALSE(c.conflicts.empty());
  // three dofs: 0 -F- 1 -E- 2 -F- 0 with E on (0, 2)
  const SwapGraph tri{3, {{1, 2}, {2, 1}, {0, 2}, {2, 0}}, {{0, 1}, {1, 0}, {2, 2}}};
  CHECK(validate(tri).valid);
  CHECK(has_self_reproducing_chain(tri) == closure(tri).contradiction);
}

TEST_CASE("closure is monotone, idempotent and symmetric") {
  for (int m = 1; m <= 3; ++m)
    for (const SwapGraph& g : enumerate_valid_graphs(m)) {
      const GraphClosure c = closure(g);
      CHECK(includes(c.graph, g));
      CHECK(symmetric(c.graph.E));
      CHECK(symmetric(c.graph.F));
      const GraphClosure cc = closure(c.graph);
      CHECK(cc.graph == c.graph);
      CHECK(c.contradiction == has_self_reproducing_chain(g));
      if (!c.contradiction) {
        // shortcuts added by the closure do not lengthen chains
        CHECK(max_chain_depth(c.graph, m + 1).depth == max_chain_depth(g, m + 1).depth);
        CHECK(max_chain_depth(g, m + 1).depth <= m - 1);
      }
    }
}

TEST_CASE("enumeration counts") {
  CHECK(enumerate_valid_graphs(1).size() == 3);
  CHECK(enumerate_valid_graphs(2).size() == 27);
  CHECK(enumerate_valid_graphs(3).size() == 729);
  for (const auto& g : enumerate_valid_graphs(2)) CHECK(validate(g).valid);
  CHECK_THROWS(enumerate_valid_graphs(6));
}

TEST_CASE("ladder reaches the bound") {
  for (int m = 1; m <= 9; ++m) {
    const SwapGraph g = ladder_graph(m);
    CHECK(validate(g).valid);
    const GraphClosure c = closure(g);
    CHECK_FALSE(c.contradiction);
    CHECK(max_chain_depth(c.graph, 100).depth == m - 1);
  }
}

TEST_CASE("depth limit") {
  const SwapGraph g = ladder_graph(6);
  const ChainDepth d = max_chain_depth(g, 3);
  CHECK(d.depth == 3);
  CHECK(d.at_limit);
}

TEST_CASE("scan up to three dofs") {
  for (int m = 1; m <= 3; ++m) {
    const GraphScan s = scan_graphs(m, 2);
    CHECK(s.depth_bound_violations == 0);
    CHECK(s.cycle_mismatches == 0);
    CHECK(s.max_depth == m - 1);
  }
}
