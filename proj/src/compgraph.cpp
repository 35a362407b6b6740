#include "gptlab/compgraph.hpp"

#include <algorithm>

#include "gptlab/config.hpp"

namespace gptlab {
namespace {

using Adj = std::vector<std::vector<char>>;

Adj to_matrix(int m, const std::set<Edge>& edges) {
  Adj a(static_cast<std::size_t>(m), std::vector<char>(static_cast<std::size_t>(m), 0));
  for (const auto& [i, j] : edges)
    if (i >= 0 && j >= 0 && i < m && j < m)
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
  return a;
}

std::set<Edge> to_edges(const Adj& a) {
  std::set<Edge> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[i][j]) out.emplace(static_cast<int>(i), static_cast<int>(j));
  return out;
}

// a * b * a over the boolean semiring
Adj sandwich(const Adj& a, const Adj& b) {
  const std::size_t m = a.size();
  Adj ab(m, std::vector<char>(m, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (a[i][j])
        for (std::size_t k = 0; k < m; ++k) ab[i][k] |= b[j][k];
  Adj out(m, std::vector<char>(m, 0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k)
      if (ab[i][k])
        for (std::size_t l = 0; l < m; ++l) out[i][l] |= a[k][l];
  return out;
}

// step[j][l]: F(j,k) and E(k,l) for some k
Adj round_step(const Adj& e, const Adj& f) {
  const std::size_t m = e.size();
  Adj s(m, std::vector<char>(m, 0));
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k)
      if (f[j][k])
        for (std::size_t l = 0; l < m; ++l) s[j][l] |= e[k][l];
  return s;
}

std::string edge_name(const Edge& e) {
  return "(v" + std::to_string(e.first + 1) + ", w" + std::to_string(e.second + 1) + ")";
}

}  // namespace

GraphValidation validate(const SwapGraph& g) {
  GraphValidation r;
  const auto bad = [&](std::string msg) {
    r.valid = false;
    r.violations.push_back(std::move(msg));
  };
  if (g.m < 0) bad("negative dof count");
  for (const auto* set : {&g.E, &g.F}) {
    const char* name = set == &g.E ? "E" : "F";
    for (const auto& e : *set) {
      if (e.first < 0 || e.second < 0 || e.first >= g.m || e.second >= g.m) {
        bad(std::string(name) + " edge " + edge_name(e) + " is out of range");
        continue;
      }
      if (!set->count({e.second, e.first}))
        bad(std::string("rule 1: ") + name + " has " + edge_name(e) + " but not its mirror " +
            edge_name({e.second, e.first}));
    }
  }
  for (const auto& e : g.E)
    if (g.F.count(e)) bad("rule 2: " + edge_name(e) + " is in both E and F");
  return r;
}

GraphClosure closure(const SwapGraph& g) {
  GraphClosure out;
  const int m = g.m;
  Adj e = to_matrix(m, g.E);
  Adj f = to_matrix(m, g.F);
  for (bool changed = true; changed;) {
    changed = false;
    ++out.passes;
    const Adj ne = sandwich(e, f);
    const Adj nf = sandwich(f, e);
    for (std::size_t i = 0; i < e.size(); ++i)
      for (std::size_t j = 0; j < e.size(); ++j) {
        if (ne[i][j] && !e[i][j]) {
          e[i][j] = e[j][i] = 1;
          changed = true;
        }
        if (nf[i][j] && !f[i][j]) {
          f[i][j] = f[j][i] = 1;
          changed = true;
        }
      }
  }
  out.graph.m = m;
  out.graph.E = to_edges(e);
  out.graph.F = to_edges(f);
  for (const auto& x : out.graph.E)
    if (out.graph.F.count(x)) out.conflicts.push_back(x);
  out.contradiction = !out.conflicts.empty();
  return out;
}

ChainDepth max_chain_depth(const SwapGraph& g, int limit) {
  ChainDepth r;
  const std::size_t m = static_cast<std::size_t>(std::max(g.m, 0));
  const Adj e = to_matrix(g.m, g.E);
  const Adj step = round_step(e, to_matrix(g.m, g.F));
  std::vector<char> layer(m, 0);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < m; ++j) layer[j] |= e[k][j];
  for (int n = 0; n < limit; ++n) {
    std::vector<char> next(m, 0);
    bool any = false;
    for (std::size_t j = 0; j < m; ++j)
      if (layer[j])
        for (std::size_t l = 0; l < m; ++l)
          if (step[j][l]) next[l] = 1, any = true;
    if (!any) return r;
    r.depth = n + 1;
    layer = std::move(next);
  }
  r.at_limit = true;
  return r;
}

bool has_self_reproducing_chain(const SwapGraph& g) {
  const std::size_t m = static_cast<std::size_t>(std::max(g.m, 0));
  const Adj e = to_matrix(g.m, g.E);
  const Adj step = round_step(e, to_matrix(g.m, g.F));
  // j must end some E edge and return to itself after at least one round
  for (std::size_t j = 0; j < m; ++j) {
    bool ends_edge = false;
    for (std::size_t k = 0; k < m; ++k) ends_edge |= e[k][j] != 0;
    if (!ends_edge) continue;
    std::vector<char> seen(m, 0);
    std::vector<std::size_t> stack;
    for (std::size_t l = 0; l < m; ++l)
      if (step[j][l]) seen[l] = 1, stack.push_back(l);
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      if (x == j) return true;
      for (std::size_t l = 0; l < m; ++l)
        if (step[x][l] && !seen[l]) seen[l] = 1, stack.push_back(l);
    }
  }
  return false;
}

std::vector<SwapGraph> enumerate_valid_graphs(int m) {
  if (m < 0 || m > 5) throw InputError("enumerate_valid_graphs: m must lie in [0, 5]");
  std::vector<Edge> orbits;
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) orbits.emplace_back(i, j);
  std::size_t total = 1;
  for (std::size_t k = 0; k < orbits.size(); ++k) total *= 3;
  std::vector<SwapGraph> out;
  out.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    SwapGraph g;
    g.m = m;
    std::size_t c = code;
    for (const auto& [i, j] : orbits) {
      const std::size_t digit = c % 3;
      c /= 3;
      if (digit == 0) continue;
      auto& set = digit == 1 ? g.E : g.F;
      set.emplace(i, j);
      set.emplace(j, i);
    }
    out.push_back(std::move(g));
  }
  return out;
}

SwapGraph ladder_graph(int m) {
  if (m < 1) throw InputError("ladder_graph: m must be positive");
  SwapGraph g;
  g.m = m;
  const auto both = [](std::set<Edge>& s, int i, int j) {
    s.emplace(i, j);
    s.emplace(j, i);
  };
  for (int i = 0; i + 1 < m; ++i) both(i % 2 == 0 ? g.E : g.F, i, i + 1);
  both(m % 2 == 1 ? g.E : g.F, m - 1, m - 1);
  return g;
}

SwapGraph composite_graph() {
  SwapGraph g;
  g.m = 2;
  g.E = {{0, 0}, {0, 1}, {1, 0}};
  g.F = {{1, 1}};
  return g;
}

GraphScan scan_graphs(int m, std::size_t threads) {
  const std::vector<SwapGraph> graphs = enumerate_valid_graphs(m);
  struct Row {
    bool contradiction = false;
    bool cycle = false;
    int depth = 0;
  };
  std::vector<Row> rows(graphs.size());
  // depth is bounded by m for non-contradictory graphs, so m + 1 rounds
  // suffice to tell a finite depth from an unbounded one
  parallel_for(graphs.size(), threads == 0 ? default_threads() : threads, [&](std::size_t i) {
    const GraphClosure c = closure(graphs[i]);
    rows[i].contradiction = c.contradiction;
    rows[i].cycle = has_self_reproducing_chain(graphs[i]);
    const ChainDepth d = max_chain_depth(c.graph, m + 1);
    rows[i].depth = d.at_limit ? m + 1 : d.depth;
  });
  GraphScan s;
  s.m = m;
  s.graphs = graphs.size();
  for (const Row& r : rows) {
    if (r.contradiction != r.cycle) ++s.cycle_mismatches;
    if (r.contradiction) {
      ++s.contradictory;
      continue;
    }
    s.max_depth = std::max(s.max_depth, r.depth);
    if (r.depth > m - 1) ++s.depth_bound_violations;
  }
  return s;
}

}  // namespace gptlab
