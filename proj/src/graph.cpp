#include "fairx/graph.hpp"

#include <algorithm>

#include "fairx/errors.hpp"

namespace fairx {

ExchangeGraph build_exchange_graph(const ExchangeMatrix& x, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("graph: alpha must be in (0,1)");
  ExchangeGraph g;
  g.n = x.n();
  g.alpha = alpha;
  g.adj.assign(g.n, 0u);
  const double cut = 1.0 - alpha;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (i != j && x(i, j) < cut) g.adj[i] |= (1u << j);
  return g;
}

TopoResult topological_order(const ExchangeGraph& g) {
  TopoResult r;
  std::vector<int> indeg(g.n, 0);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (g.edge(i, j)) ++indeg[j];

  std::vector<bool> removed(g.n, false);
  for (int step = 0; step < g.n; ++step) {
    int pick = -1;
    for (int v = 0; v < g.n; ++v) {
      if (!removed[v] && indeg[v] == 0) {
        pick = v;
        break;
      }
    }
    if (pick < 0) break;
    removed[pick] = true;
    r.order.push_back(pick);
    for (int j = 0; j < g.n; ++j)
      if (g.edge(pick, j)) --indeg[j];
  }

  if (static_cast<int>(r.order.size()) == g.n) {
    r.acyclic = true;
    return r;
  }

  // Remaining nodes all have in-degree > 0 within the residual graph; walk
  // from the lowest remaining index along lowest-index successors until a
  // node repeats.
  r.acyclic = false;
  r.order.clear();
  int start = 0;
  while (removed[start]) ++start;
  std::vector<int> visit_pos(g.n, -1);
  std::vector<int> path;
  int cur = start;
  while (visit_pos[cur] < 0) {
    visit_pos[cur] = static_cast<int>(path.size());
    path.push_back(cur);
    int next = -1;
    for (int j = 0; j < g.n; ++j) {
      if (!removed[j] && g.edge(cur, j)) {
        next = j;
        break;
      }
    }
    cur = next;  // residual nodes always have a residual successor
  }
  r.cycle.assign(path.begin() + visit_pos[cur], path.end());
  return r;
}

std::vector<std::pair<int, int>> edges_from_to(const ExchangeGraph& g, const std::vector<int>& a,
                                               const std::vector<int>& b) {
  std::uint32_t in_a = 0, in_b = 0;
  for (int v : a) in_a |= (1u << v);
  for (int v : b) in_b |= (1u << v);
  if ((in_a & in_b) != 0) throw InputError("graph: edges_from_to sets must be disjoint");

  std::vector<std::pair<int, int>> out;
  for (int j = 0; j < g.n; ++j) {
    if (!((in_a >> j) & 1u)) continue;
    for (int i = 0; i < g.n; ++i)
      if (((in_b >> i) & 1u) && g.edge(j, i)) out.emplace_back(j, i);
  }
  return out;  // loop order is already lexicographic by (j, i)
}

}  // namespace fairx
