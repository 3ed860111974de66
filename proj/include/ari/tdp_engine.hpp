#ifndef ARI_TDP_ENGINE_HPP
#define ARI_TDP_ENGINE_HPP

// Bounds for every supra-threshold cluster and output-sensitive retrieval
// of the maximal clusters whose TDP bound reaches a threshold gamma.
//
// Bounds are computed per path of a vertex-disjoint path cover: the subtree
// of the path's first vertex is listed in post-order with the path's own
// child visited first, so each on-path vertex's cluster is a prefix of that
// listing and one chain pass yields all of their bounds. The total chain
// length is sigma = sum of subtree sizes over path starts, minimised by
// heavy covers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ari/chain_bounds.hpp"
#include "ari/cluster_forest.hpp"
#include "ari/error.hpp"
#include "ari/stats.hpp"

namespace ari {

// ---------------------------------------------------------------------------
// Path covers

struct PathCover {
  std::vector<Rank> next;             // successor on the path, kNoRank at path ends
  std::vector<Rank> starts;           // first vertex of each path
  std::vector<std::uint32_t> path_of; // rank -> index into starts
  std::uint64_t sigma = 0;
  bool heavy_first = false;           // every successor is the first listed child

  std::size_t path_count() const noexcept { return starts.size(); }

  std::vector<Rank> path(std::size_t i) const {
    std::vector<Rank> out;
    for (Rank v = starts[i]; v != kNoRank; v = next[v])
      out.push_back(v);
    return out;
  }
};

/// Cover in which every non-leaf continues to `next[v]` (one of its
/// children) and every leaf ends its path. Such covers are minimal and
/// vertex-disjoint.
inline PathCover cover_from_successors(const ClusterForest& f, std::vector<Rank> next) {
  const std::size_t m = f.vertex_count();
  if (next.size() != m)
    throw InputError("successor array does not match forest size");
  PathCover cover;
  cover.heavy_first = true;
  for (Rank v = 0; v < m; ++v) {
    if (f.is_leaf(v)) {
      if (next[v] != kNoRank)
        throw InputError("leaf " + std::to_string(v) + " cannot continue a path");
    } else {
      if (next[v] == kNoRank || next[v] >= m || f.parent(next[v]) != v)
        throw InputError("successor of rank " + std::to_string(v) + " is not one of its children");
      cover.heavy_first = cover.heavy_first && next[v] == f.heavy_child(v);
    }
  }
  cover.next = std::move(next);

  // A vertex starts a path unless its parent continues into it.
  cover.path_of.assign(m, 0);
  for (Rank v = static_cast<Rank>(m); v-- > 0;) {
    const Rank p = f.parent(v);
    if (p != kNoRank && cover.next[p] == v) {
      cover.path_of[v] = cover.path_of[p];
      continue;
    }
    cover.path_of[v] = static_cast<std::uint32_t>(cover.starts.size());
    cover.starts.push_back(v);
    cover.sigma += f.size(v);
  }
  return cover;
}

/// The minimal, vertex-disjoint, heavy cover following first children.
inline PathCover heavy_path_cover(const ClusterForest& f) {
  std::vector<Rank> next(f.vertex_count());
  for (Rank v = 0; v < f.vertex_count(); ++v)
    next[v] = f.heavy_child(v);
  return cover_from_successors(f, std::move(next));
}

// ---------------------------------------------------------------------------
// Bounds

/// Per-rank bound arrays. d and q are meaningful for representatives only
/// and are zero elsewhere.
struct ClusterBounds {
  std::vector<std::uint32_t> d;
  std::vector<double> q;
  std::vector<Rank> label;  // end of the heavy path through the vertex
  std::uint64_t sigma = 0;
  std::uint64_t chain_elements = 0;  // total length of chains handed to the TDN pass
};

struct BoundsOptions {
  bool zeta_shrink = true;
};

/// Heavy-path terminus for every rank.
inline std::vector<Rank> heavy_path_ends(const ClusterForest& f) {
  std::vector<Rank> end(f.vertex_count());
  for (Rank v = 0; v < f.vertex_count(); ++v)  // children have smaller ranks
    end[v] = f.is_leaf(v) ? v : end[f.heavy_child(v)];
  return end;
}

inline double tdp_of(std::uint32_t d, std::uint32_t size) {
  return static_cast<double>(d) / static_cast<double>(size);
}

inline ClusterBounds compute_all_bounds(const ClusterForest& f, const PathCover& cover,
                                        const SimesContext& ctx, BoundsOptions options = {}) {
  const std::size_t m = f.vertex_count();
  if (ctx.c.size() != m || cover.next.size() != m)
    throw InputError("forest, cover and discretised p-values differ in size");

  ClusterBounds b;
  b.d.assign(m, 0);
  b.q.assign(m, 0.0);
  b.label = heavy_path_ends(f);
  b.sigma = cover.sigma;

  const bool shrink = options.zeta_shrink;
  const std::size_t zeta = ctx.zeta;
  IntervalPartition scratch;
  std::vector<std::int64_t> chain;
  std::vector<std::uint32_t> out;
  std::vector<std::uint32_t> kept_before;  // kept members among the first t of the listing

  // Runs the chain for one listing and stores the bounds of the on-path
  // vertices starting at `start`.
  auto run = [&](std::span<const Rank> listing, Rank start) {
    chain.clear();
    kept_before.resize(listing.size() + 1);
    kept_before[0] = 0;
    for (std::size_t i = 0; i < listing.size(); ++i) {
      const Rank r = listing[i];
      if (!shrink || r < zeta)
        chain.push_back(ctx.c[r]);
      kept_before[i + 1] = static_cast<std::uint32_t>(chain.size());
    }
    out.resize(chain.size());
    compute_tdn_bounds(chain, out, scratch);
    b.chain_elements += chain.size();
    for (Rank v = start; v != kNoRank; v = cover.next[v]) {
      if (!f.is_representative(v))
        continue;
      const std::uint32_t t = kept_before[f.size(v)];
      b.d[v] = t == 0 ? 0 : out[t - 1];
      b.q[v] = tdp_of(b.d[v], f.size(v));
    }
  };

  if (cover.heavy_first) {
    for (Rank s : cover.starts)
      run(f.subtree(s), s);
  } else {
    // Post-order with the path successor visited before its siblings.
    std::vector<Rank> listing;
    std::vector<std::pair<Rank, std::size_t>> stack;
    auto child_at = [&](Rank v, std::size_t i) -> Rank {
      const auto kids = f.children(v);
      const Rank first = cover.next[v];
      if (i == 0)
        return first;
      // Remaining children in list order, skipping the successor.
      std::size_t seen = 0;
      for (Rank c : kids)
        if (c != first && ++seen == i)
          return c;
      return kNoRank;
    };
    for (Rank s : cover.starts) {
      listing.clear();
      stack.emplace_back(s, 0);
      while (!stack.empty()) {
        auto& [v, i] = stack.back();
        if (i < f.children(v).size()) {
          const Rank c = child_at(v, i++);
          stack.emplace_back(c, 0);
        } else {
          listing.push_back(v);
          stack.pop_back();
        }
      }
      run(listing, s);
    }
  }
  return b;
}

// ---------------------------------------------------------------------------
// Query index

struct AdmissibleIndex {
  std::vector<Rank> order;          // admissible ranks, ascending q, ties by rank
  std::vector<double> best_within;  // rank -> max q over representative ancestors-or-self
};

/// Keeps representatives whose bound strictly exceeds that of every
/// representative ancestor, sorted ascending by bound.
inline AdmissibleIndex build_admissible_index(const ClusterForest& f, const ClusterBounds& b) {
  const std::size_t m = f.vertex_count();
  AdmissibleIndex idx;
  idx.best_within.assign(m, -1.0);
  for (Rank v = static_cast<Rank>(m); v-- > 0;) {  // parents before children
    const Rank p = f.parent(v);
    const double above = p == kNoRank ? -1.0 : idx.best_within[p];
    double here = above;
    if (f.is_representative(v)) {
      if (b.q[v] > above)
        idx.order.push_back(v);
      here = std::max(above, b.q[v]);
    }
    idx.best_within[v] = here;
  }
  std::sort(idx.order.begin(), idx.order.end(), [&](Rank a, Rank c) {
    return b.q[a] < b.q[c] || (b.q[a] == b.q[c] && a < c);
  });
  return idx;
}

/// Largest threshold at which each rank still lies in a reported cluster.
inline std::vector<double> max_gamma_map(const ClusterForest& f, const ClusterBounds& b) {
  return build_admissible_index(f, b).best_within;
}

inline void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw InputError("TDP threshold must lie in [0,1], got " + std::to_string(gamma));
}

struct Cluster {
  Rank representative = kNoRank;
  std::uint32_t size = 0;
  std::uint32_t d = 0;
  double q = 0.0;
  Rank label = kNoRank;
  std::span<const Rank> members;  // post-order, representative last
};

/// Query scratch (mark buffer) over a shared, immutable forest and index.
/// One session per thread.
class QuerySession {
public:
  QuerySession(const ClusterForest& f, const ClusterBounds& b, const AdmissibleIndex& idx)
      : forest_(&f), bounds_(&b), index_(&idx), marked_(f.vertex_count(), 0) {}

  /// Maximal supra-threshold clusters with q >= gamma, in ascending q order.
  std::vector<Cluster> query(double gamma) {
    check_gamma(gamma);
    std::vector<Cluster> result;
    const auto& order = index_->order;
    const std::size_t first = first_at_least(gamma);
    last_search_steps_ = search_steps_;

    for (std::size_t i = first; i < order.size(); ++i) {
      const Rank v = order[i];
      if (marked_[v])
        continue;
      const auto members = forest_->subtree(v);
      for (Rank r : members)
        marked_[r] = 1;
      result.push_back(Cluster{v, forest_->size(v), bounds_->d[v], bounds_->q[v],
                               bounds_->label[v], members});
    }
    for (const auto& c : result)  // clear only what was touched
      for (Rank r : c.members)
        marked_[r] = 0;
    return result;
  }

  /// Search steps used by the last query (instrumentation).
  std::size_t last_search_steps() const noexcept { return last_search_steps_; }

private:
  // Leftmost position in the ascending list with q >= gamma. A linear scan
  // from the top end and a binary search advance in lockstep; whichever
  // finishes first answers.
  std::size_t first_at_least(double gamma) {
    const auto& order = index_->order;
    const auto& q = bounds_->q;
    std::size_t linear = order.size();
    std::size_t lo = 0, hi = order.size();
    search_steps_ = 0;
    while (true) {
      ++search_steps_;
      if (linear == 0 || q[order[linear - 1]] < gamma)
        return linear;
      --linear;
      if (lo >= hi)
        return lo;
      const std::size_t mid = lo + (hi - lo) / 2;
      if (q[order[mid]] < gamma)
        lo = mid + 1;
      else
        hi = mid;
      if (lo >= hi)
        return lo;
    }
  }

  const ClusterForest* forest_;
  const ClusterBounds* bounds_;
  const AdmissibleIndex* index_;
  std::vector<std::uint8_t> marked_;
  std::size_t search_steps_ = 0;
  std::size_t last_search_steps_ = 0;
};

inline std::vector<Cluster> query_maximal_clusters(const ClusterForest& f, const ClusterBounds& b,
                                                   const AdmissibleIndex& idx, double gamma) {
  QuerySession session(f, b, idx);
  return session.query(gamma);
}

// ---------------------------------------------------------------------------
// Size-versus-threshold curve

struct CurveRow {
  double gamma = 0.0;
  Rank label = kNoRank;
  Rank representative = kNoRank;
  std::uint32_t size = 0;
  Rank parent_label = kNoRank;  // label of the enclosing cluster at the previous gamma
};

/// One row per maximal cluster per grid value (grid ascending). Each row
/// records which cluster of the previous grid value contains it, so splits
/// show up as several rows sharing one parent label.
inline std::vector<CurveRow> size_curve(const ClusterForest& f, const ClusterBounds& b,
                                        const AdmissibleIndex& idx, std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    check_gamma(grid[i]);
    if (i > 0 && grid[i] < grid[i - 1])
      throw InputError("threshold grid must be ascending");
  }
  QuerySession session(f, b, idx);
  std::vector<CurveRow> rows;
  // Previous clusters as post-order ranges [begin, end) sorted by begin.
  struct Range {
    std::size_t begin, end;
    Rank label;
  };
  std::vector<Range> previous, current;
  for (double gamma : grid) {
    auto clusters = session.query(gamma);
    std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& c) {
      return a.size > c.size || (a.size == c.size && a.representative < c.representative);
    });
    current.clear();
    for (const auto& c : clusters) {
      const std::size_t end = f.post_index(c.representative) + 1;
      const std::size_t begin = end - c.size;
      Rank parent_label = kNoRank;
      auto it = std::upper_bound(previous.begin(), previous.end(), begin,
                                 [](std::size_t x, const Range& r) { return x < r.begin; });
      if (it != previous.begin()) {
        --it;
        if (begin >= it->begin && end <= it->end)
          parent_label = it->label;
      }
      rows.push_back(CurveRow{gamma, c.label, c.representative, c.size, parent_label});
      current.push_back(Range{begin, end, c.label});
    }
    std::sort(current.begin(), current.end(),
              [](const Range& a, const Range& c) { return a.begin < c.begin; });
    std::swap(previous, current);
  }
  return rows;
}

} // namespace ari

#endif // ARI_TDP_ENGINE_HPP
