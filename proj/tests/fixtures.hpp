#ifndef ARI_TESTS_FIXTURES_HPP
#define ARI_TESTS_FIXTURES_HPP

#include <utility>
#include <vector>

#include "ari/ari.hpp"

namespace ari::fixture {

// The 3x3 grid example. Vertex id = rank = label - 1 where labels are
// 1..9 in ascending p-value order:
//
//   1 5 4
//   8 7 2
//   3 9 6
inline std::vector<std::pair<VertexId, VertexId>> grid9_edges() {
  const int labelled[12][2] = {{1, 5}, {1, 8}, {7, 5}, {7, 8}, {7, 2}, {7, 9},
                               {3, 8}, {3, 9}, {6, 9}, {6, 2}, {4, 5}, {4, 2}};
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (const auto& e : labelled)
    edges.emplace_back(static_cast<VertexId>(e[0] - 1), static_cast<VertexId>(e[1] - 1));
  return edges;
}

inline Graph grid9_graph() { return Graph::from_edges(9, grid9_edges()); }

/// Strictly increasing, so ranks coincide with vertex ids.
inline std::vector<double> grid9_pvalues() {
  return {0.0005, 0.001, 0.002, 0.004, 0.008, 0.2, 0.4, 0.6, 0.9};
}

/// Expected parent of each label (0 = root).
inline std::vector<int> grid9_parent_labels() { return {5, 4, 8, 5, 6, 7, 8, 9, 0}; }

} // namespace ari::fixture

#endif // ARI_TESTS_FIXTURES_HPP
