#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace decsim {

// Undirected communication graph. Nodes are 0-based. Edges are stored as
// canonical (min, max) pairs; neighbor lists are sorted ascending and
// symmetric by construction.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> neighbors;

  int degree(int i) const { return static_cast<int>(neighbors[i].size()); }
  bool has_edge(int i, int j) const;
  bool is_connected() const;
  int num_edges() const { return static_cast<int>(edges.size()); }
};

// Builds a Graph from an edge list, canonicalizing and validating
// (no self-loops, no duplicates, endpoints in range).
Graph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges);

// Cycle over n >= 3 nodes; node i is linked to (i-1) mod n and (i+1) mod n.
Graph build_ring(int n);

// rows x cols grid with wrap-around in both directions; node (r, c) has
// index r*cols + c. Both dimensions must be >= 3 so the wrap-around
// neighbors are distinct.
Graph build_torus(int rows, int cols);

// All n(n-1)/2 edges, n >= 2.
Graph build_complete(int n);

// k if every node has degree k, empty otherwise.
std::optional<int> regularity(const Graph& g);

}  // namespace decsim
