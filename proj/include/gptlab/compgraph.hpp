#pragma once

// Degree-of-freedom graphs for composite particles.
//
// Each particle carries m degrees of freedom. Vertices v_i and w_j stand for
// dof i of the left particle and dof j of the right one. An edge (i, j) in E
// says dofs (v_i, w_j) can hold an entangled state; in F, an entangled
// effect. Both sets are symmetric and disjoint. Swapping concatenates
// E(i,j) F(j,k) E(k,l) into E(i,l); dual swapping concatenates
// F(i,j) E(j,k) F(k,l) into F(i,l).
//
// Indices are 0-based here and 1-based in graph files.

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gptlab {

using Edge = std::pair<int, int>;

struct SwapGraph {
  int m = 0;
  std::set<Edge> E;
  std::set<Edge> F;

  bool operator==(const SwapGraph&) const = default;
};

struct GraphValidation {
  bool valid = true;
  std::vector<std::string> violations;
};

// Index range, symmetry of E and F, disjointness.
GraphValidation validate(const SwapGraph& g);

struct GraphClosure {
  SwapGraph graph;
  bool contradiction = false;
  std::vector<Edge> conflicts;  // edges that ended up in both sets
  int passes = 0;
};

// Least fixpoint under both concatenation rules, mirrored after every
// addition. The contradiction flag is raised when an edge lands in E and F.
GraphClosure closure(const SwapGraph& g);

struct ChainDepth {
  int depth = 0;
  bool at_limit = false;  // chains of `limit` rounds exist; the true depth may be larger
};

// Longest alternating chain e f e ... f e, counted in f edges. A chain is a
// walk over right endpoints: after an E edge ending at j, one round moves to
// l whenever F(j,k) and E(k,l). Layers are expanded breadth first.
ChainDepth max_chain_depth(const SwapGraph& g, int limit);

// True if some chain concatenates to its own first edge, which is the
// obstruction that forces the closure into a contradiction.
bool has_self_reproducing_chain(const SwapGraph& g);

// Every valid graph on m dofs: each symmetric pair {(i,j),(j,i)} is absent,
// in E, or in F. There are 3^(m(m+1)/2) of them.
std::vector<SwapGraph> enumerate_valid_graphs(int m);

// Alternating path 0 - 1 - ... - (m-1): pair (i, i+1) goes to E for even i
// and to F for odd i, and a loop on m-1 takes the type its neighbour lacks.
// Its depth is m - 1.
SwapGraph ladder_graph(int m);

// The two-dof composite: E = {(0,0),(0,1),(1,0)}, F = {(1,1)}.
SwapGraph composite_graph();

struct GraphScan {
  int m = 0;
  std::size_t graphs = 0;
  std::size_t contradictory = 0;
  int max_depth = 0;  // over non-contradictory graphs
  std::size_t depth_bound_violations = 0;  // depth > m - 1
  std::size_t cycle_mismatches = 0;  // contradiction != self-reproducing chain
};

GraphScan scan_graphs(int m, std::size_t threads = 0);

}  // namespace gptlab
