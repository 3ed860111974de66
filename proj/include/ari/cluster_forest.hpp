#ifndef ARI_CLUSTER_FOREST_HPP
#define ARI_CLUSTER_FOREST_HPP

// Forest of all supra-threshold clusters. Vertices are ranks (ascending
// p-value order). The subtree rooted at rank v holds exactly the component
// of v in the subgraph induced by ranks 0..v. Children lists put the heavy
// child (largest subtree, smallest rank on ties) first, so one heavy-first
// post-order of the whole forest lists every subtree as a contiguous slice.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ari/error.hpp"
#include "ari/graph.hpp"
#include "ari/stats.hpp"

namespace ari {

class ClusterForest {
public:
  ClusterForest() = default;

  /// Rebuilds a forest from parent links and the ordered child lists
  /// (children listed per parent in ascending parent order). If
  /// `children` is empty the lists are ordered by ascending rank before the
  /// heavy child is moved to the front.
  static ClusterForest from_parents(std::vector<Rank> parent, std::vector<std::uint8_t> representative,
                                    std::vector<Rank> children = {}) {
    const std::size_t m = parent.size();
    if (representative.size() != m)
      throw InputError("representative flags do not match forest size");
    ClusterForest f;
    f.m_ = m;
    f.child_offsets_.assign(m + 1, 0);
    for (std::size_t v = 0; v < m; ++v) {
      const Rank p = parent[v];
      if (p == kNoRank)
        continue;
      if (p >= m || p <= v)
        throw InputError("parent of rank " + std::to_string(v) + " must be a larger rank");
      ++f.child_offsets_[p + 1];
    }
    for (std::size_t v = 0; v < m; ++v)
      f.child_offsets_[v + 1] += f.child_offsets_[v];

    if (children.empty()) {
      children.resize(f.child_offsets_[m]);
      std::vector<std::size_t> fill(f.child_offsets_.begin(), f.child_offsets_.end() - 1);
      for (std::size_t v = 0; v < m; ++v)
        if (parent[v] != kNoRank)
          children[fill[parent[v]]++] = static_cast<Rank>(v);
    } else {
      if (children.size() != f.child_offsets_[m])
        throw InputError("child list length does not match parent links");
      std::vector<std::uint8_t> listed(m, 0);
      for (std::size_t v = 0; v < m; ++v)
        for (std::size_t i = f.child_offsets_[v]; i < f.child_offsets_[v + 1]; ++i)
          if (children[i] >= m || parent[children[i]] != v || listed[children[i]]++)
            throw InputError("child list disagrees with parent links");
    }
    f.parent_ = std::move(parent);
    f.children_ = std::move(children);
    f.representative_ = std::move(representative);
    f.finish();
    return f;
  }

  std::size_t vertex_count() const noexcept { return m_; }
  Rank parent(Rank v) const { return parent_[v]; }
  bool is_root(Rank v) const { return parent_[v] == kNoRank; }
  bool is_leaf(Rank v) const { return child_offsets_[v] == child_offsets_[v + 1]; }
  bool is_representative(Rank v) const { return representative_[v] != 0; }
  std::uint32_t size(Rank v) const { return size_[v]; }

  /// Children with the heavy child first.
  std::span<const Rank> children(Rank v) const {
    return {children_.data() + child_offsets_[v], children_.data() + child_offsets_[v + 1]};
  }
  Rank heavy_child(Rank v) const { return is_leaf(v) ? kNoRank : children_[child_offsets_[v]]; }

  const std::vector<Rank>& roots() const noexcept { return roots_; }
  const std::vector<Rank>& parents() const noexcept { return parent_; }
  const std::vector<Rank>& child_list() const noexcept { return children_; }
  const std::vector<std::uint8_t>& representative_flags() const noexcept { return representative_; }

  /// Heavy-first post-order of the whole forest.
  const std::vector<Rank>& postorder() const noexcept { return postorder_; }
  std::size_t post_index(Rank v) const { return post_index_[v]; }

  /// Members of the cluster rooted at v, heavy-first post-order, v last.
  std::span<const Rank> subtree(Rank v) const {
    const std::size_t end = post_index_[v] + 1;
    return {postorder_.data() + end - size_[v], postorder_.data() + end};
  }

private:
  friend ClusterForest build_forest(const Graph& g, const SortedPValues& sp);

  // Sizes, heavy-child placement, roots and the global post-order.
  void finish() {
    size_.assign(m_, 1);
    roots_.clear();
    for (std::size_t v = 0; v < m_; ++v) {  // children precede parents
      if (parent_[v] == kNoRank)
        roots_.push_back(static_cast<Rank>(v));
      else
        size_[parent_[v]] += size_[v];
    }
    for (std::size_t v = 0; v < m_; ++v) {
      auto* first = children_.data() + child_offsets_[v];
      auto* last = children_.data() + child_offsets_[v + 1];
      if (first == last)
        continue;
      auto* heavy = first;
      for (auto* it = first + 1; it != last; ++it)
        if (size_[*it] > size_[*heavy] || (size_[*it] == size_[*heavy] && *it < *heavy))
          heavy = it;
      std::iter_swap(first, heavy);
    }

    postorder_.clear();
    postorder_.reserve(m_);
    post_index_.assign(m_, 0);
    std::vector<std::pair<Rank, std::size_t>> stack;
    for (Rank root : roots_) {
      stack.emplace_back(root, child_offsets_[root]);
      while (!stack.empty()) {
        auto& [v, next] = stack.back();
        if (next < child_offsets_[v + 1]) {
          const Rank c = children_[next++];
          stack.emplace_back(c, child_offsets_[c]);
        } else {
          post_index_[v] = postorder_.size();
          postorder_.push_back(v);
          stack.pop_back();
        }
      }
    }
  }

  std::size_t m_ = 0;
  std::vector<Rank> parent_;
  std::vector<std::size_t> child_offsets_{0};
  std::vector<Rank> children_;
  std::vector<std::uint32_t> size_;
  std::vector<Rank> roots_;
  std::vector<std::uint8_t> representative_;
  std::vector<Rank> postorder_;
  std::vector<std::size_t> post_index_;
};

/// Builds the cluster forest with one find and at most one link per edge.
inline ClusterForest build_forest(const Graph& g, const SortedPValues& sp) {
  if (g.vertex_count() != sp.m)
    throw InputError("graph has " + std::to_string(g.vertex_count()) + " vertices but " +
                     std::to_string(sp.m) + " p-values were given");
  const std::size_t m = sp.m;
  ClusterForest f;
  f.m_ = m;
  f.parent_.assign(m, kNoRank);
  f.child_offsets_.assign(m + 1, 0);
  f.children_.clear();
  f.children_.reserve(m);

  // Neighbours of lower rank, regrouped by rank. Scanning the graph in
  // vertex order keeps both passes close to sequential.
  std::vector<std::size_t> offset(m + 1, 0);
  for (VertexId y = 0; y < m; ++y) {
    const Rank ry = sp.rank_of[y];
    for (VertexId z : g.neighbors(y))
      offset[ry + 1] += sp.rank_of[z] < ry ? 1 : 0;
  }
  for (std::size_t v = 0; v < m; ++v)
    offset[v + 1] += offset[v];
  std::vector<Rank> lower(offset[m]);
  for (VertexId y = 0; y < m; ++y) {
    const Rank ry = sp.rank_of[y];
    std::size_t at = offset[ry];
    for (VertexId z : g.neighbors(y))
      if (sp.rank_of[z] < ry)
        lower[at++] = sp.rank_of[z];
  }

  // Union-find over ranks in which the root of every set is its largest
  // rank, i.e. the forest root of the corresponding subtree: each root found
  // while processing v is linked directly below v. Path halving only.
  std::vector<Rank> link(m);
  std::iota(link.begin(), link.end(), Rank{0});
  auto find = [&link](Rank x) {
    while (link[x] != x) {
      link[x] = link[link[x]];
      x = link[x];
    }
    return x;
  };
  for (Rank v = 0; v < m; ++v) {
    for (std::size_t e = offset[v]; e < offset[v + 1]; ++e) {
      const Rank w = find(lower[e]);
      if (w == v)
        continue;
      f.parent_[w] = v;
      f.children_.push_back(w);  // attachments arrive grouped by v
      link[w] = v;
    }
    f.child_offsets_[v + 1] = f.children_.size();
  }

  f.representative_.assign(m, 1);
  for (std::size_t v = 0; v < m; ++v)
    if (f.parent_[v] != kNoRank && sp.values[f.parent_[v]] == sp.values[v])
      f.representative_[v] = 0;
  f.finish();
  return f;
}

/// Ranks whose component is a supra-threshold cluster.
inline std::vector<Rank> representatives(const ClusterForest& f) {
  std::vector<Rank> out;
  for (Rank v = 0; v < f.vertex_count(); ++v)
    if (f.is_representative(v))
      out.push_back(v);
  return out;
}

inline std::vector<Rank> subtree_members(const ClusterForest& f, Rank v) {
  if (v >= f.vertex_count())
    throw InputError("rank " + std::to_string(v) + " is outside the forest");
  const auto s = f.subtree(v);
  return {s.begin(), s.end()};
}

} // namespace ari

#endif // ARI_CLUSTER_FOREST_HPP
