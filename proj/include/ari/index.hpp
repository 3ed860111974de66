#ifndef ARI_INDEX_HPP
#define ARI_INDEX_HPP

#include <array>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ari/cluster_forest.hpp"
#include "ari/graph.hpp"
#include "ari/stats.hpp"
#include "ari/tdp_engine.hpp"

namespace ari {

struct GridMeta {
  std::array<std::size_t, 3> dims{1, 1, 1};
  int connectivity = 18;
  std::vector<std::size_t> voxel_of;  // vertex -> linear voxel index (x-fastest)

  std::array<std::size_t, 3> coordinates(VertexId v) const {
    const std::size_t i = voxel_of[v];
    return {i % dims[0], (i / dims[0]) % dims[1], i / (dims[0] * dims[1])};
  }
  std::size_t voxel_count() const { return dims[0] * dims[1] * dims[2]; }
};

struct BuildStats {
  std::size_t edges = 0;
  std::size_t representatives = 0;
  std::uint64_t sigma = 0;
  std::uint64_t chain_elements = 0;
  double seconds_forest = 0;  // sorting, forest construction, path cover
  double seconds_bounds = 0;  // h, zeta, discretisation, chain passes
  double seconds_index = 0;   // admissible list

  double seconds_total() const { return seconds_forest + seconds_bounds + seconds_index; }
};

struct BuildOptions {
  BoundsOptions bounds{};
};

/// Everything needed to answer threshold queries: the cluster forest, the
/// bound of every supra-threshold cluster and the admissible list. Immutable
/// once built; give each thread its own QuerySession.
class AriIndex {
public:
  double alpha = 0.05;
  std::size_t m = 0;
  std::size_t h = 0;
  std::size_t zeta = 0;
  std::vector<VertexId> perm;  // rank -> vertex id
  ClusterForest forest;
  ClusterBounds bounds;
  AdmissibleIndex admissible;
  std::optional<GridMeta> grid;
  BuildStats stats;

  static AriIndex build(const Graph& g, std::span<const double> pvalues, double alpha,
                        BuildOptions options = {}) {
    using clock = std::chrono::steady_clock;
    auto seconds = [](clock::time_point a, clock::time_point b) {
      return std::chrono::duration<double>(b - a).count();
    };
    if (g.vertex_count() != pvalues.size())
      throw InputError("graph has " + std::to_string(g.vertex_count()) + " vertices but " +
                       std::to_string(pvalues.size()) + " p-values were given");

    AriIndex x;
    const auto t0 = clock::now();
    SortedPValues sp = sort_pvalues(pvalues, alpha);
    x.forest = build_forest(g, sp);
    const PathCover cover = heavy_path_cover(x.forest);
    const auto t1 = clock::now();
    const SimesContext ctx = make_simes_context(sp);
    x.bounds = compute_all_bounds(x.forest, cover, ctx, options.bounds);
    const auto t2 = clock::now();
    x.admissible = build_admissible_index(x.forest, x.bounds);
    const auto t3 = clock::now();

    x.alpha = alpha;
    x.m = sp.m;
    x.h = ctx.h;
    x.zeta = ctx.zeta;
    x.perm = std::move(sp.perm);
    x.stats.edges = g.edge_count();
    x.stats.representatives = representatives(x.forest).size();
    x.stats.sigma = cover.sigma;
    x.stats.chain_elements = x.bounds.chain_elements;
    x.stats.seconds_forest = seconds(t0, t1);
    x.stats.seconds_bounds = seconds(t1, t2);
    x.stats.seconds_index = seconds(t2, t3);
    return x;
  }

  static AriIndex build(const GridGraph& gg, const GridSpec& spec, std::span<const double> pvalues,
                        double alpha, BuildOptions options = {}) {
    AriIndex x = build(gg.graph, pvalues, alpha, options);
    x.grid = GridMeta{spec.dims, spec.connectivity, gg.voxel_of};
    return x;
  }

  QuerySession session() const { return QuerySession(forest, bounds, admissible); }

  VertexId vertex(Rank r) const { return perm[r]; }

  /// gamma_v indexed by vertex id.
  std::vector<double> gamma_map() const {
    std::vector<double> out(m);
    for (Rank r = 0; r < m; ++r)
      out[perm[r]] = admissible.best_within[r];
    return out;
  }
};

} // namespace ari

#endif // ARI_INDEX_HPP
