// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Timing limits are pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ari;

namespace {

constexpr double kTinyCaseSeconds = 1e-3;
constexpr double kOracleSuiteSeconds = 30.0;
constexpr double kQuerySuiteSeconds = 60.0;
constexpr double kCoverSuiteSeconds = 60.0;
constexpr double kBuildSeconds = 3.0;          // k = 61 cube, end to end
constexpr double kAverageQuerySeconds = 20e-3;
constexpr double kBuildRatio = 10.0;           // k = 64 versus k = 32
constexpr double kEmptyQuerySeconds = 1e-3;

using clock_type = std::chrono::steady_clock;

double since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
  Outcome out;
  const auto t0 = clock_type::now();
  try {
    out = check();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds = since(t0);
  std::printf("%s  %-34s %8.3f s  %s\n", out.ok ? "PASS" : "FAIL", name, seconds, out.detail.c_str());
  std::fflush(stdout);
  failures += out.ok ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

struct Pipeline {
  SortedPValues sp;
  SimesContext ctx;
  ClusterForest f;
  PathCover cover;
  ClusterBounds b;
  AdmissibleIndex idx;
};

Pipeline run_pipeline(const Graph& g, const std::vector<double>& p, double alpha) {
  Pipeline x;
  x.sp = sort_pvalues(p, alpha);
  x.ctx = make_simes_context(x.sp);
  x.f = build_forest(g, x.sp);
  x.cover = heavy_path_cover(x.f);
  x.b = compute_all_bounds(x.f, x.cover, x.ctx);
  x.idx = build_admissible_index(x.f, x.b);
  return x;
}

std::vector<double> twentieths() {
  std::vector<double> g;
  for (int i = 0; i <= 20; ++i)
    g.push_back(i * 0.05);
  return g;
}

bool heavy(const ClusterForest& f, const std::vector<Rank>& next) {
  for (Rank v = 0; v < f.vertex_count(); ++v) {
    if (f.is_leaf(v))
      continue;
    std::uint32_t biggest = 0;
    for (Rank c : f.children(v))
      biggest = std::max(biggest, f.size(c));
    if (f.size(next[v]) != biggest)
      return false;
  }
  return true;
}

// Heavy covers reach the minimum and every minimiser is heavy.
bool cover_claims_hold(const ClusterForest& f) {
  std::uint64_t best = UINT64_MAX;
  oracle::for_each_minimal_cover(f, [&](const std::vector<Rank>& next) {
    best = std::min(best, cover_from_successors(f, next).sigma);
  });
  if (heavy_path_cover(f).sigma != best)
    return false;
  bool ok = true;
  oracle::for_each_minimal_cover(f, [&](const std::vector<Rank>& next) {
    ok = ok && ((cover_from_successors(f, next).sigma == best) == heavy(f, next));
  });
  return ok;
}

double sigma_bound(double m) {
  const double n = m + 1.0;
  return n * std::log(n) / std::log(4.0) + (5.0 / 6.0 - std::log(3.0) / std::log(4.0)) * n;
}

double cube_build_seconds(std::size_t k, std::uint64_t seed, AriIndex* keep = nullptr) {
  const auto p = gen_pvalues(k * k * k, seed);
  const auto t0 = clock_type::now();
  const GridSpec spec = GridSpec::full({k, k, k}, 18);
  const GridGraph gg = grid_to_graph(spec);
  AriIndex x = AriIndex::build(gg, spec, p, 0.05);
  const double s = since(t0);
  if (keep)
    *keep = std::move(x);
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// ---------------------------------------------------------------------------

Outcome chain_example() {
  const std::vector<std::int64_t> c{3, 1, 5, 3, 6};
  const auto t0 = clock_type::now();
  const auto d = compute_tdn_bounds(c);
  const double s = since(t0);
  const bool exact = d == std::vector<std::uint32_t>{0, 1, 1, 1, 1};
  std::string shown = "d = (";
  for (std::size_t i = 0; i < d.size(); ++i)
    shown += (i ? "," : "") + std::to_string(d[i]);
  return {exact && s < kTinyCaseSeconds, shown + fmt(") [%.2g s]", s)};
}

Outcome grid_example() {
  const Graph g = fixture::grid9_graph();
  const auto p = fixture::grid9_pvalues();
  const auto t0 = clock_type::now();
  const auto sp = sort_pvalues(p, 0.05);
  const auto f = build_forest(g, sp);
  const auto cover = heavy_path_cover(f);
  const double s = since(t0);
  const auto expect = fixture::grid9_parent_labels();
  bool ok = true;
  for (Rank v = 0; v < 9; ++v)
    ok = ok && (f.is_root(v) ? 0 : static_cast<int>(f.parent(v)) + 1) == expect[v];
  ok = ok && cover.sigma == 11;
  return {ok && s < kTinyCaseSeconds, std::string(ok ? "parents match" : "parents differ") +
                                          fmt(", sigma = %.0f [%.2g s]", cover.sigma, s)};
}

Outcome chain_oracle() {
  const auto t0 = clock_type::now();
  std::mt19937_64 rng(1001);
  int chains = 0, instances = 0;
  for (; chains < 1000; ++chains) {
    const std::size_t len = 1 + rng() % 200;
    std::vector<std::int64_t> c(len);
    for (auto& x : c)
      x = 1 + static_cast<std::int64_t>(rng() % (2 * len));
    if (compute_tdn_bounds(c) != naive_chain_bounds(c))
      return {false, fmt("chain %.0f differs", chains)};
  }
  const double alphas[] = {0.01, 0.05, 0.2};
  for (; instances < 210; ++instances) {
    const std::size_t m = 1 + rng() % 100;
    const auto inst = oracle::random_instance(rng, m, 0.0, instances % 4 == 0);
    const auto ctx = make_simes_context(sort_pvalues(inst.pvalues, alphas[instances % 3]));
    std::vector<Rank> order(m);
    for (Rank r = 0; r < m; ++r)
      order[r] = r;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::int64_t> c;
    for (Rank r : order)
      c.push_back(ctx.c[r]);
    const auto out = compute_tdn_bounds(c);
    for (std::size_t i = 0; i < m; ++i)
      if (out[i] != naive_d(std::span<const Rank>(order.data(), i + 1), ctx))
        return {false, fmt("instance %.0f prefix %.0f differs", instances, static_cast<double>(i))};
  }
  const double s = since(t0);
  return {s < kOracleSuiteSeconds, fmt("%.0f chains, %.0f p-value instances", chains, instances)};
}

Outcome forest_oracle() {
  const auto t0 = clock_type::now();
  std::mt19937_64 rng(1002);
  const double densities[] = {0.005, 0.02, 0.05, 0.1, 0.4};
  int graphs = 0;
  for (; graphs < 250; ++graphs) {
    const std::size_t m = 1 + rng() % 100;
    const auto inst = oracle::random_instance(rng, m, densities[graphs % 5], graphs % 3 == 0);
    const auto sp = sort_pvalues(inst.pvalues, 0.05);
    const auto f = build_forest(inst.graph, sp);
    for (Rank v = 0; v < m; ++v) {
      const auto members = subtree_members(f, v);
      if (std::set<Rank>(members.begin(), members.end()) != oracle::component_below(inst.graph, sp, v))
        return {false, fmt("graph %.0f rank %.0f differs", graphs, v)};
    }
  }
  const double s = since(t0);
  return {s < kOracleSuiteSeconds, fmt("%.0f graphs", graphs)};
}

Outcome query_oracle() {
  const auto t0 = clock_type::now();
  std::mt19937_64 rng(1003);
  int instances = 0;
  for (; instances < 250; ++instances) {
    const std::size_t m = 1 + rng() % 100;
    const auto inst = oracle::random_instance(rng, m, std::array{0.01, 0.03, 0.1}[instances % 3],
                                              instances % 4 == 0);
    const auto x = run_pipeline(inst.graph, inst.pvalues, std::array{0.01, 0.05, 0.2}[instances % 3]);
    QuerySession session(x.f, x.b, x.idx);
    for (double gamma : twentieths()) {
      std::vector<Rank> got;
      for (const auto& c : session.query(gamma))
        got.push_back(c.representative);
      std::sort(got.begin(), got.end());
      if (got != oracle::maximal_clusters(x.f, x.b.q, gamma))
        return {false, fmt("instance %.0f gamma %.2f differs", instances, gamma)};
    }
  }
  const double s = since(t0);
  return {s < kQuerySuiteSeconds, fmt("%.0f instances x 21 thresholds", instances)};
}

Outcome cover_optimality() {
  const auto t0 = clock_type::now();
  std::size_t trees = 0;
  // Every increasing tree (parent rank above child rank) on up to 9 vertices;
  // these realise every rooted tree shape.
  for (std::size_t m = 1; m <= 9; ++m) {
    std::vector<Rank> parent(m, kNoRank);
    bool ok = true;
    std::function<void(std::size_t)> rec = [&](std::size_t v) {
      if (!ok)
        return;
      if (v + 1 >= m) {
        ++trees;
        ok = cover_claims_hold(oracle::forest_from_parents(parent));
        return;
      }
      for (Rank p = static_cast<Rank>(v + 1); p < m; ++p) {
        parent[v] = p;
        rec(v + 1);
      }
    };
    rec(0);
    if (!ok)
      return {false, fmt("counterexample among trees of order %.0f", m)};
  }
  std::mt19937_64 rng(1004);
  int random_trees = 0;
  for (; random_trees < 150; ++random_trees) {
    const std::size_t m = 10 + rng() % 3;
    std::vector<Rank> parent(m, kNoRank);
    for (std::size_t v = 0; v + 1 < m; ++v)
      parent[v] = static_cast<Rank>(v + 1 + rng() % (m - v - 1));
    if (!cover_claims_hold(oracle::forest_from_parents(parent)))
      return {false, fmt("random tree %.0f is a counterexample", random_trees)};
  }
  const double s = since(t0);
  return {s < kCoverSuiteSeconds, fmt("%.0f exhaustive trees (m <= 9), %.0f random (m <= 12)",
                                      static_cast<double>(trees), random_trees)};
}

Outcome sigma_numerics() {
  // Complete binary trees, heap labels, rank = m - label.
  for (std::size_t m = 1; m <= 4096; ++m) {
    std::vector<Rank> parent(m, kNoRank);
    for (std::size_t label = 2; label <= m; ++label)
      parent[m - label] = static_cast<Rank>(m - label / 2);
    if (heavy_path_cover(oracle::forest_from_parents(parent)).sigma != oracle::digit_sum_total(m))
      return {false, fmt("complete binary tree of order %.0f", static_cast<double>(m))};
  }

  std::mt19937_64 rng(1005);
  int forests = 0;
  double worst = 0;  // largest sigma / bound
  auto check = [&](const ClusterForest& f) {
    const double bound = sigma_bound(static_cast<double>(f.vertex_count()));
    const double sigma = static_cast<double>(heavy_path_cover(f).sigma);
    worst = std::max(worst, sigma / bound);
    ++forests;
    return sigma <= bound;
  };
  for (int i = 0; i < 60; ++i) {
    const std::size_t m = 1 + rng() % 10000;
    std::vector<Rank> parent(m, kNoRank);
    for (std::size_t v = 0; v + 1 < m; ++v)  // uniform random recursive tree
      parent[v] = static_cast<Rank>(v + 1 + rng() % (m - v - 1));
    if (!check(oracle::forest_from_parents(parent)))
      return {false, fmt("random recursive tree of order %.0f", static_cast<double>(m))};
  }
  for (int i = 0; i < 30; ++i) {
    const std::size_t m = 1 + rng() % 10000;
    if (!check(oracle::forest_from_parents(oracle::random_forest_parents(rng, m, 0.001 * (i % 5)))))
      return {false, fmt("local random forest of order %.0f", static_cast<double>(m))};
  }
  for (int i = 0; i < 20; ++i) {  // forests of actual grid instances
    const std::size_t k = 2 + rng() % 20;
    const auto gg = grid_to_graph(GridSpec::full({k, k, k}, std::array{6, 18, 26}[i % 3]));
    const auto sp = sort_pvalues(gen_pvalues(k * k * k, rng()), 0.05);
    if (!check(build_forest(gg.graph, sp)))
      return {false, fmt("grid forest k = %.0f", static_cast<double>(k))};
  }

  for (std::size_t m : {100u, 1000u}) {
    const auto inst = gen_caterpillar(m);
    const auto f = build_forest(inst.graph, sort_pvalues(inst.pvalues, 0.05));
    const auto heavy_sigma = heavy_path_cover(f).sigma;
    std::vector<Rank> next(m, kNoRank);
    for (std::size_t i = 1; i <= m / 2; ++i)
      next[m - i] = static_cast<Rank>(i - 1);
    std::uint64_t expect = 0;
    for (std::size_t i = 1; i <= m / 2; ++i)
      expect += 2 * i;
    if (heavy_sigma > 2 * m || cover_from_successors(f, next).sigma != expect)
      return {false, fmt("caterpillar m = %.0f: heavy %.0f", static_cast<double>(m),
                         static_cast<double>(heavy_sigma))};
  }
  return {true, fmt("binary trees 1..4096 exact; %.0f forests, max sigma/bound = %.4f; caterpillars ok",
                    forests, worst)};
}

Outcome scaling() {
  AriIndex big;
  std::vector<double> builds;
  for (int rep = 0; rep < 3; ++rep)
    builds.push_back(cube_build_seconds(61, 7 + rep, rep == 0 ? &big : nullptr));
  const double build61 = median(builds);

  auto session = big.session();
  double total = 0;
  const auto grid = default_gamma_grid();
  for (double gamma : grid) {
    const auto t0 = clock_type::now();
    const auto clusters = session.query(gamma);
    total += since(t0);
  }
  const double avg_query = total / static_cast<double>(grid.size());

  std::vector<double> b32, b64;
  cube_build_seconds(32, 99);  // warm-up runs, discarded as in run_bench
  cube_build_seconds(64, 199);
  for (int rep = 0; rep < 5; ++rep) {
    b32.push_back(cube_build_seconds(32, 100 + rep));
    b64.push_back(cube_build_seconds(64, 200 + rep));
  }
  const double ratio = median(b64) / median(b32);
  const bool ok = build61 <= kBuildSeconds && avg_query <= kAverageQuerySeconds && ratio <= kBuildRatio;
  return {ok, fmt("k=61 (m=%.0f) build %.3f s, avg query %.3f ms, build k64/k32 = %.2f",
                  static_cast<double>(big.m), build61, avg_query * 1e3, ratio)};
}

Outcome output_sensitivity() {
  // Null p-values keep every bound below 1, so thresholds above the largest
  // bound give empty answers.
  std::string detail;
  bool ok = true;
  for (std::size_t k : {32u, 48u, 61u}) {
    const std::size_t m = k * k * k;
    std::vector<double> p(m);
    std::mt19937_64 rng(300 + k);
    for (auto& v : p)
      v = uniform_open01(rng());
    const GridSpec spec = GridSpec::full({k, k, k}, 18);
    const AriIndex x = AriIndex::build(grid_to_graph(spec), spec, p, 0.05);
    double top = 0;
    for (Rank r : x.admissible.order)
      top = std::max(top, x.bounds.q[r]);
    if (!(top < 1.0))
      return {false, fmt("k=%.0f: no empty threshold exists", k)};
    std::vector<double> gammas;
    for (int i = 1; i <= 1000; ++i)
      gammas.push_back(std::min(1.0, top + (1.0 - top) * i / 1000.0 + 1e-12));
    auto session = x.session();
    std::size_t returned = 0;
    const auto t0 = clock_type::now();
    for (double g : gammas)
      returned += session.query(g).size();
    const double avg = since(t0) / static_cast<double>(gammas.size());
    ok = ok && returned == 0 && avg <= kEmptyQuerySeconds;
    detail += fmt("k=%.0f: %.2g ms  ", k, avg * 1e3);
  }
  return {ok, detail};
}

Outcome gamma_map_consistency() {
  std::mt19937_64 rng(1006);
  int instances = 0;
  for (; instances < 120; ++instances) {
    const std::size_t m = 1 + rng() % 200;
    const auto inst = oracle::random_instance(rng, m, 3.0 / static_cast<double>(m), instances % 3 == 0);
    const auto x = run_pipeline(inst.graph, inst.pvalues, 0.05);
    const auto gmap = max_gamma_map(x.f, x.b);
    QuerySession session(x.f, x.b, x.idx);
    for (double gamma : twentieths()) {
      std::vector<std::uint8_t> in(m, 0);
      for (const auto& c : session.query(gamma))
        for (Rank r : c.members)
          in[r] = 1;
      for (Rank r = 0; r < m; ++r)
        if ((in[r] != 0) != (gamma <= gmap[r]))
          return {false, fmt("instance %.0f rank %.0f gamma %.2f", instances, r, gamma)};
    }
  }
  return {true, fmt("%.0f instances x 21 thresholds", instances)};
}

Outcome persistence() {
  std::mt19937_64 rng(1007);
  int instances = 0;
  for (; instances < 60; ++instances) {
    const auto inst = oracle::random_instance(rng, 1 + rng() % 200, 0.03, instances % 3 == 0);
    const auto x = AriIndex::build(inst.graph, inst.pvalues, 0.05);
    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    save_structure(x, buf);
    const auto y = load_structure(buf);
    auto sx = x.session();
    auto sy = y.session();
    for (int i = 0; i <= 100; ++i) {
      const auto a = sx.query(i / 100.0);
      const auto b = sy.query(i / 100.0);
      bool same = a.size() == b.size();
      for (std::size_t k = 0; same && k < a.size(); ++k)
        same = a[k].representative == b[k].representative && a[k].d == b[k].d &&
               std::memcmp(&a[k].q, &b[k].q, sizeof(double)) == 0 && a[k].label == b[k].label &&
               std::equal(a[k].members.begin(), a[k].members.end(), b[k].members.begin(), b[k].members.end());
      if (!same)
        return {false, fmt("instance %.0f gamma %.2f", instances, i / 100.0)};
    }
  }
  return {true, fmt("%.0f instances x 101 thresholds", instances)};
}

} // namespace

int main() {
  report("chain bounds (3,1,5,3,6)", chain_example);
  report("3x3 grid forest and cover", grid_example);
  report("chain bounds vs oracles", chain_oracle);
  report("forest vs BFS components", forest_oracle);
  report("queries vs maximality oracle", query_oracle);
  report("heavy covers minimise sigma", cover_optimality);
  report("sigma numerics", sigma_numerics);
  report("scaling on cubes", scaling);
  report("empty queries are fast", output_sensitivity);
  report("gamma map vs queries", gamma_map_consistency);
  report("persistence round trip", persistence);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
