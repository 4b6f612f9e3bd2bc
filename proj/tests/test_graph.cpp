#include <doctest.h>

#include <vector>

#include "fairx/errors.hpp"
#include "fairx/graph.hpp"
#include "fairx/rng.hpp"

using namespace fairx;

TEST_CASE("edge set follows the strict threshold") {
  ExchangeMatrix ones = ExchangeMatrix::ones_off_diagonal(3);
  ExchangeGraph g1 = build_exchange_graph(ones, 0.1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK_FALSE(g1.edge(i, j));

  ExchangeMatrix zero(2);
  ExchangeGraph g2 = build_exchange_graph(zero, 0.1);
  CHECK(g2.edge(0, 1));
  CHECK(g2.edge(1, 0));

  ExchangeMatrix x(2);
  x.set(0, 1, 0.95);
  x.set(1, 0, 0.2);
  ExchangeGraph g3 = build_exchange_graph(x, 0.1);
  CHECK_FALSE(g3.edge(0, 1));  // 0.95 >= 0.9
  CHECK(g3.edge(1, 0));

  // boundary is excluded bit-for-bit
  ExchangeMatrix b(2);
  b.set(0, 1, 0.9);
  CHECK_FALSE(build_exchange_graph(b, 0.1).edge(0, 1));

  CHECK_THROWS_AS(build_exchange_graph(zero, 0.0), InputError);
  CHECK_THROWS_AS(build_exchange_graph(zero, 1.0), InputError);
}

TEST_CASE("acyclicity and witness cycles") {
  ExchangeMatrix ones = ExchangeMatrix::ones_off_diagonal(3);
  CHECK(is_acyclic(build_exchange_graph(ones, 0.1)));

  ExchangeMatrix zero(2);
  TopoResult cyc = topological_order(build_exchange_graph(zero, 0.1));
  CHECK_FALSE(cyc.acyclic);
  CHECK(cyc.cycle == std::vector<int>{0, 1});

  // {(0,1),(1,2),(0,2)} is a DAG with order 0,1,2
  ExchangeMatrix dag = ExchangeMatrix::ones_off_diagonal(3);
  dag.set(0, 1, 0.0);
  dag.set(1, 2, 0.0);
  dag.set(0, 2, 0.0);
  TopoResult topo = topological_order(build_exchange_graph(dag, 0.1));
  CHECK(topo.acyclic);
  CHECK(topo.order == std::vector<int>{0, 1, 2});
}

TEST_CASE("edges crossing between agent sets") {
  ExchangeMatrix ones = ExchangeMatrix::ones_off_diagonal(3);
  ExchangeGraph empty = build_exchange_graph(ones, 0.1);
  CHECK(edges_from_to(empty, {1, 2}, {0}).empty());

  ExchangeMatrix zero(2);
  ExchangeGraph two = build_exchange_graph(zero, 0.1);
  auto edges = edges_from_to(two, {1}, {0});
  REQUIRE(edges.size() == 1);
  CHECK(edges[0] == std::pair<int, int>{1, 0});

  ExchangeMatrix dag = ExchangeMatrix::ones_off_diagonal(3);
  dag.set(0, 1, 0.0);
  dag.set(1, 2, 0.0);
  dag.set(0, 2, 0.0);
  ExchangeGraph g = build_exchange_graph(dag, 0.1);
  CHECK(edges_from_to(g, {1, 2}, {0}).empty());

  CHECK_THROWS_AS(edges_from_to(g, {0, 1}, {1, 2}), InputError);
}

TEST_CASE("crossing edge lists are lexicographically sorted") {
  ExchangeMatrix x(4);  // all zeros: complete graph
  ExchangeGraph g = build_exchange_graph(x, 0.25);
  auto edges = edges_from_to(g, {1, 3}, {0, 2});
  std::vector<std::pair<int, int>> want{{1, 0}, {1, 2}, {3, 0}, {3, 2}};
  CHECK(edges == want);
}

TEST_CASE("raising entries never adds edges") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 3 + static_cast<int>(rng.below(4));
    ExchangeMatrix lo(n);
    ExchangeMatrix hi(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) {
          double a = rng.uniform01();
          lo.set(i, j, a);
          hi.set(i, j, a + rng.uniform01() * (1.0 - a));
        }
    double alpha = rng.uniform(0.05, 0.5);
    ExchangeGraph gl = build_exchange_graph(lo, alpha);
    ExchangeGraph gh = build_exchange_graph(hi, alpha);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (gh.edge(i, j)) CHECK(gl.edge(i, j));
  }
}
