#include "decsim/topology.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>

namespace decsim {

bool Graph::has_edge(int i, int j) const {
  if (i == j) return false;
  const auto& ni = neighbors[i];
  return std::binary_search(ni.begin(), ni.end(), j);
}

bool Graph::is_connected() const {
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : neighbors[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  return reached == n;
}

Graph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 1) throw std::invalid_argument("graph: node count must be >= 1");
  std::set<std::pair<int, int>> canon;
  for (auto [a, b] : edges) {
    if (a == b) throw std::invalid_argument("graph: self-loop at node " + std::to_string(a));
    if (a < 0 || b < 0 || a >= n || b >= n)
      throw std::invalid_argument("graph: edge endpoint out of range");
    auto e = std::minmax(a, b);
    if (!canon.insert({e.first, e.second}).second)
      throw std::invalid_argument("graph: duplicate edge");
  }
  Graph g;
  g.n = n;
  g.edges.assign(canon.begin(), canon.end());
  g.neighbors.assign(n, {});
  for (auto [a, b] : g.edges) {
    g.neighbors[a].push_back(b);
    g.neighbors[b].push_back(a);
  }
  for (auto& nbrs : g.neighbors) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

Graph build_ring(int n) {
  if (n < 3) throw std::invalid_argument("ring: need n >= 3, got " + std::to_string(n));
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n);
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return graph_from_edges(n, edges);
}

Graph build_torus(int rows, int cols) {
  if (rows < 3 || cols < 3)
    throw std::invalid_argument("torus: both dimensions must be >= 3, got " +
                                std::to_string(rows) + "x" + std::to_string(cols));
  std::vector<std::pair<int, int>> edges;
  edges.reserve(2 * rows * cols);
  auto idx = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      edges.emplace_back(idx(r, c), idx((r + 1) % rows, c));
      edges.emplace_back(idx(r, c), idx(r, (c + 1) % cols));
    }
  }
  return graph_from_edges(rows * cols, edges);
}

Graph build_complete(int n) {
  if (n < 2) throw std::invalid_argument("complete: need n >= 2, got " + std::to_string(n));
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return graph_from_edges(n, edges);
}

std::optional<int> regularity(const Graph& g) {
  if (g.n == 0) return std::nullopt;
  int k = g.degree(0);
  for (int i = 1; i < g.n; ++i)
    if (g.degree(i) != k) return std::nullopt;
  return k;
}

}  // namespace decsim
