#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fairx/exchange.hpp"

namespace fairx {

// Exchange graph G(x, alpha): edge (i,j) iff x_ij < 1 - alpha, strict, no
// self-loops. Acyclicity at alpha = eps/(nL) certifies eps-core stability.
struct ExchangeGraph {
  int n = 0;
  double alpha = 0.0;
  std::vector<std::uint32_t> adj;  // adjacency bitmask rows (n <= 32)

  bool edge(int i, int j) const { return (adj[i] >> j) & 1u; }
};

ExchangeGraph build_exchange_graph(const ExchangeMatrix& x, double alpha);

struct TopoResult {
  bool acyclic = false;
  std::vector<int> order;  // valid topological order when acyclic
  std::vector<int> cycle;  // witness directed cycle otherwise, as node list
};

// Kahn's algorithm with lowest-index tie-breaking; witness cycles and orders
// are reproducible.
TopoResult topological_order(const ExchangeGraph& g);

inline bool is_acyclic(const ExchangeGraph& g) { return topological_order(g).acyclic; }

// All edges (j,i) of g with j in A, i in B; A and B must be disjoint.
// Sorted lexicographically by (j,i).
std::vector<std::pair<int, int>> edges_from_to(const ExchangeGraph& g, const std::vector<int>& a,
                                               const std::vector<int>& b);

}  // namespace fairx
