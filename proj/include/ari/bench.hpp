#ifndef ARI_BENCH_HPP
#define ARI_BENCH_HPP

// Synthetic scaling scenarios: voxel cubes, perfect binary trees whose
// p-values make the cluster forest a copy of the tree, and the unbalanced
// caterpillar. P-values are cubes of uniforms from std::mt19937_64 seeded
// with the scenario seed (+ repetition index); uniforms are the top 53 bits
// divided by 2^53, with 0 replaced by 2^-54 so they lie strictly inside (0,1).

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ari/error.hpp"
#include "ari/graph.hpp"
#include "ari/index.hpp"
#include "ari/report.hpp"

namespace ari {

enum class Family { cube, perfect_binary_tree, caterpillar };

inline const char* family_name(Family f) {
  switch (f) {
  case Family::cube:
    return "cube";
  case Family::perfect_binary_tree:
    return "perfect_binary_tree";
  case Family::caterpillar:
    return "caterpillar";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "cube")
    return Family::cube;
  if (s == "perfect_binary_tree" || s == "tree")
    return Family::perfect_binary_tree;
  if (s == "caterpillar")
    return Family::caterpillar;
  throw InputError("unknown benchmark family '" + s + "'");
}

struct BenchScenario {
  std::string name;
  Family family = Family::cube;
  std::size_t size = 10;       // cube edge k, tree depth, or caterpillar order m
  int connectivity = 18;
  std::uint64_t seed = 1;
  int repetitions = 3;
  std::size_t max_vertices = std::size_t{1} << 27;
};

inline double uniform_open01(std::uint64_t bits) {
  const std::uint64_t k = bits >> 11;
  return k == 0 ? 0x1p-54 : static_cast<double>(k) * 0x1p-53;
}

inline std::vector<double> gen_pvalues(std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> p(m);
  for (auto& x : p) {
    const double u = uniform_open01(rng());
    x = u * u * u;
  }
  return p;
}

inline GridGraph gen_cube(std::size_t k, int connectivity,
                          std::size_t max_vertices = std::size_t{1} << 27) {
  if (k == 0)
    throw InputError("cube edge length must be positive");
  if (k > 2048 || k * k * k > max_vertices)
    throw InputError("cube of edge " + std::to_string(k) + " exceeds the vertex budget");
  return grid_to_graph(GridSpec::full({k, k, k}, connectivity));
}

struct Instance {
  Graph graph;
  std::vector<double> pvalues;
};

/// Tree of order 2^depth - 1. Vertex ids follow post-order and the sorted
/// p-values are assigned in that order, so every vertex's p-value exceeds
/// those below it and the cluster forest reproduces the tree.
inline Instance gen_perfect_binary_tree(std::size_t depth, std::uint64_t seed) {
  if (depth == 0 || depth > 30)
    throw InputError("tree depth must lie in [1,30]");
  const std::size_t m = (std::size_t{1} << depth) - 1;
  // Heap labels 1..m; post-order index of each label.
  std::vector<VertexId> post(m + 1);
  VertexId next = 0;
  std::vector<std::pair<std::size_t, bool>> stack{{1, false}};
  while (!stack.empty()) {
    auto [label, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      post[label] = next++;
      continue;
    }
    stack.emplace_back(label, true);
    for (std::size_t child : {2 * label + 1, 2 * label})
      if (child <= m)
        stack.emplace_back(child, false);
  }
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(m);
  for (std::size_t label = 2; label <= m; ++label)
    edges.emplace_back(post[label / 2], post[label]);

  Instance inst;
  inst.graph = Graph::from_edges(m, std::move(edges));
  inst.pvalues = gen_pvalues(m, seed);
  std::sort(inst.pvalues.begin(), inst.pvalues.end());
  return inst;
}

/// Caterpillar of even order m: spine m, m-1, ..., m/2+1 with leaf i hanging
/// off spine vertex m-i+1 (1-based labels, which are also the p-value
/// ranks). Vertex id = label - 1.
inline Instance gen_caterpillar(std::size_t m) {
  if (m < 2 || m % 2 != 0)
    throw InputError("caterpillar order must be even and at least 2");
  const std::size_t half = m / 2;
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (std::size_t i = 1; i <= half; ++i) {
    const auto spine = static_cast<VertexId>(m - i);  // label m-i+1
    edges.emplace_back(spine, static_cast<VertexId>(i - 1));
    if (i < half)
      edges.emplace_back(spine, spine - 1);
  }
  Instance inst;
  inst.graph = Graph::from_edges(m, std::move(edges));
  inst.pvalues.resize(m);
  for (std::size_t v = 0; v < m; ++v)
    inst.pvalues[v] = static_cast<double>(v + 1) / static_cast<double>(m + 1);
  return inst;
}

struct BenchRow {
  std::string scenario;
  std::string family;
  std::size_t m = 0;
  std::string phase_or_gamma;
  double seconds = 0;
  double output_size = 0;
  double sigma = 0;
};

inline std::vector<double> default_gamma_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 100; ++i)
    g.push_back(i / 100.0);
  return g;
}

/// Averages the three construction phases and the per-threshold query times
/// over the repetitions. One extra warm-up run is discarded.
inline std::vector<BenchRow> run_bench(const BenchScenario& sc, double alpha) {
  if (sc.repetitions < 1)
    throw InputError("repetitions must be at least 1");
  using clock = std::chrono::steady_clock;
  const std::string name = sc.name.empty()
                               ? std::string(family_name(sc.family)) + "-" + std::to_string(sc.size)
                               : sc.name;

  // The graph does not change between repetitions; only the p-values do.
  Graph graph;
  std::vector<double> fixed_p;
  if (sc.family == Family::cube) {
    graph = gen_cube(sc.size, sc.connectivity, sc.max_vertices).graph;
  } else if (sc.family == Family::perfect_binary_tree) {
    if (sc.size > 30 || (std::size_t{1} << sc.size) - 1 > sc.max_vertices)
      throw InputError("tree exceeds the vertex budget");
    graph = gen_perfect_binary_tree(sc.size, sc.seed).graph;
  } else {
    if (sc.size > sc.max_vertices)
      throw InputError("caterpillar exceeds the vertex budget");
    auto inst = gen_caterpillar(sc.size);
    graph = std::move(inst.graph);
    fixed_p = std::move(inst.pvalues);
  }
  const std::size_t m = graph.vertex_count();
  const auto grid = default_gamma_grid();

  double forest = 0, bounds = 0, index = 0, sigma = 0;
  std::vector<double> query_seconds(grid.size(), 0.0), output(grid.size(), 0.0);
  for (int rep = -1; rep < sc.repetitions; ++rep) {
    std::vector<double> p;
    const std::uint64_t seed = sc.seed + static_cast<std::uint64_t>(rep + 1);
    if (sc.family == Family::cube) {
      p = gen_pvalues(m, seed);
    } else if (sc.family == Family::perfect_binary_tree) {
      p = gen_pvalues(m, seed);
      std::sort(p.begin(), p.end());
    } else {
      p = fixed_p;
    }
    const AriIndex x = AriIndex::build(graph, p, alpha);
    auto session = x.session();
    std::vector<double> qs(grid.size()), out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto t0 = clock::now();
      const auto clusters = session.query(grid[g]);
      qs[g] = std::chrono::duration<double>(clock::now() - t0).count();
      std::size_t covered = 0;
      for (const auto& c : clusters)
        covered += c.size;
      out[g] = static_cast<double>(covered);
    }
    if (rep < 0)
      continue;  // warm-up
    forest += x.stats.seconds_forest;
    bounds += x.stats.seconds_bounds;
    index += x.stats.seconds_index;
    sigma += static_cast<double>(x.stats.sigma);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      query_seconds[g] += qs[g];
      output[g] += out[g];
    }
  }

  const double n = sc.repetitions;
  const std::string fam = family_name(sc.family);
  std::vector<BenchRow> rows;
  rows.push_back({name, fam, m, "forest", forest / n, 0, sigma / n});
  rows.push_back({name, fam, m, "bounds", bounds / n, 0, sigma / n});
  rows.push_back({name, fam, m, "index", index / n, 0, sigma / n});
  for (std::size_t g = 0; g < grid.size(); ++g)
    rows.push_back({name, fam, m, format_fixed(grid[g], 2), query_seconds[g] / n, output[g] / n,
                    sigma / n});
  return rows;
}

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows, bool header = true) {
  if (header)
    out << "scenario,family,m,phase_or_gamma,seconds,output_size,sigma\n";
  for (const auto& r : rows)
    out << r.scenario << ',' << r.family << ',' << r.m << ',' << r.phase_or_gamma << ','
        << format_fixed(r.seconds, 9) << ',' << format_fixed(r.output_size, 1) << ','
        << format_fixed(r.sigma, 1) << '\n';
}

} // namespace ari

#endif // ARI_BENCH_HPP
