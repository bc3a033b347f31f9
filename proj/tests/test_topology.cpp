#include <doctest.h>

#include <algorithm>
#include <set>

#include "decsim/topology.hpp"

using namespace decsim;

namespace {

// Neighbor symmetry, no self-loops, endpoints in range.
void check_well_formed(const Graph& g) {
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : g.edges) {
    CHECK(a < b);
    CHECK(a >= 0);
    CHECK(b < g.n);
    CHECK(seen.insert({a, b}).second);
  }
  for (int i = 0; i < g.n; ++i) {
    for (int j : g.neighbors[i]) {
      CHECK(j != i);
      CHECK(g.has_edge(i, j));
      CHECK(g.has_edge(j, i));
    }
  }
}

}  // namespace

TEST_SUITE_BEGIN("topology");

TEST_CASE("ring of 3 is the triangle") {
  const Graph g = build_ring(3);
  CHECK(g.n == 3);
  const std::vector<std::pair<int, int>> expect = {{0, 1}, {0, 2}, {1, 2}};
  CHECK(g.edges == expect);
  check_well_formed(g);
}

TEST_CASE("ring of 25 has 25 edges and degree 2") {
  const Graph g = build_ring(25);
  CHECK(g.num_edges() == 25);
  for (int i = 0; i < 25; ++i) CHECK(g.degree(i) == 2);
  CHECK(regularity(g) == 2);
  check_well_formed(g);
}

TEST_CASE("ring of 4 is a plain cycle") {
  const Graph g = build_ring(4);
  const std::vector<std::pair<int, int>> expect = {{0, 1}, {0, 3}, {1, 2}, {2, 3}};
  CHECK(g.edges == expect);
}

TEST_CASE("ring rejects n < 3") {
  CHECK_THROWS_AS(build_ring(2), std::invalid_argument);
  CHECK_THROWS_AS(build_ring(0), std::invalid_argument);
}

TEST_CASE("torus 5x5 is 4-regular with 2*rows*cols edges") {
  const Graph g = build_torus(5, 5);
  CHECK(g.n == 25);
  CHECK(g.num_edges() == 50);
  CHECK(regularity(g) == 4);
  check_well_formed(g);
}

TEST_CASE("torus 3x3 edge count") {
  const Graph g = build_torus(3, 3);
  CHECK(g.n == 9);
  CHECK(g.num_edges() == 18);
  CHECK(regularity(g) == 4);
}

TEST_CASE("torus 3x4 index arithmetic") {
  const Graph g = build_torus(3, 4);
  // node 0 = (0,0): rows wrap to 4 and 8, columns wrap to 1 and 3
  CHECK(g.neighbors[0] == std::vector<int>{1, 3, 4, 8});
  check_well_formed(g);
}

TEST_CASE("torus rejects dimensions < 3") {
  CHECK_THROWS_AS(build_torus(2, 5), std::invalid_argument);
  CHECK_THROWS_AS(build_torus(5, 2), std::invalid_argument);
}

TEST_CASE("complete graph") {
  CHECK(build_complete(2).edges == std::vector<std::pair<int, int>>{{0, 1}});
  const Graph g25 = build_complete(25);
  CHECK(g25.num_edges() == 300);
  CHECK(regularity(g25) == 24);
  const Graph g4 = build_complete(4);
  for (int i = 0; i < 4; ++i) CHECK(g4.degree(i) == 3);
  CHECK_THROWS_AS(build_complete(1), std::invalid_argument);
}

TEST_CASE("regularity on a path graph is empty") {
  const Graph path = graph_from_edges(3, {{0, 1}, {1, 2}});
  CHECK(!regularity(path).has_value());
  CHECK(regularity(build_ring(25)) == 2);
  CHECK(regularity(build_complete(25)) == 24);
}

TEST_CASE("all generators produce connected graphs") {
  CHECK(build_ring(7).is_connected());
  CHECK(build_torus(3, 5).is_connected());
  CHECK(build_complete(6).is_connected());
  const Graph split = graph_from_edges(4, {{0, 1}, {2, 3}});
  CHECK(!split.is_connected());
}

TEST_CASE("graph_from_edges validates input") {
  CHECK_THROWS_AS(graph_from_edges(3, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(graph_from_edges(3, {{0, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(graph_from_edges(3, {{0, 1}, {1, 0}}), std::invalid_argument);
}

TEST_SUITE_END();
