#ifndef ARI_STATS_HPP
#define ARI_STATS_HPP

// Simes/closed-testing primitives behind the TDP bounds: sorting p-values,
// the Hommel-type quantity h, the rank cutoff zeta, the integer
// discretisation c(v), and direct (slow) evaluations of delta, d and q that
// serve as reference implementations.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ari/error.hpp"

namespace ari {

/// Position of a vertex in ascending p-value order (0-based).
using Rank = std::uint32_t;
/// Original, caller-facing vertex id (0-based).
using VertexId = std::uint32_t;

inline constexpr Rank kNoRank = std::numeric_limits<Rank>::max();

struct SortedPValues {
  std::size_t m = 0;
  std::vector<VertexId> perm;   // rank -> vertex id
  std::vector<Rank> rank_of;    // vertex id -> rank
  std::vector<double> values;   // ascending, rank-indexed
  double alpha = 0.05;
};

struct SimesContext {
  std::size_t h = 0;
  std::size_t zeta = 0;         // ranks r < zeta (0-based) can contribute to any d(S)
  std::vector<std::int64_t> c;  // rank-indexed discretised p-values, all >= 1
  double alpha = 0.05;
};

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InputError("alpha must lie in (0,1), got " + std::to_string(alpha));
}

namespace detail {

struct Keyed {
  std::uint64_t key;
  VertexId id;
};

/// Sorts by (key, id). One bucketing pass on the leading 16 bits of the
/// key range, then each bucket is sorted in place. Non-negative doubles
/// order like their bit patterns.
inline void bucket_sort(std::vector<Keyed>& items) {
  if (items.size() < 2)
    return;
  auto [lo, hi] = std::minmax_element(items.begin(), items.end(),
                                      [](const Keyed& a, const Keyed& b) { return a.key < b.key; });
  const std::uint64_t base = lo->key;
  const int width = std::bit_width(hi->key - base);
  const int shift = width > 16 ? width - 16 : 0;
  std::vector<std::uint32_t> start((std::size_t{1} << 16) + 1, 0);
  for (const auto& it : items)
    ++start[((it.key - base) >> shift) + 1];
  for (std::size_t b = 1; b < start.size(); ++b)
    start[b] += start[b - 1];
  std::vector<Keyed> out(items.size());
  std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
  for (const auto& it : items)
    out[fill[(it.key - base) >> shift]++] = it;
  auto less = [](const Keyed& a, const Keyed& b) { return a.key < b.key || (a.key == b.key && a.id < b.id); };
  for (std::size_t b = 0; b + 1 < start.size(); ++b)
    if (start[b + 1] - start[b] > 1)
      std::sort(out.begin() + start[b], out.begin() + start[b + 1], less);
  items.swap(out);
}

} // namespace detail

/// Stable ascending sort; equal p-values keep vertex-id order.
inline SortedPValues sort_pvalues(std::span<const double> raw, double alpha) {
  check_alpha(alpha);
  if (raw.empty())
    throw InputError("no p-values given");
  if (raw.size() >= static_cast<std::size_t>(kNoRank))
    throw InputError("too many vertices");
  for (std::size_t v = 0; v < raw.size(); ++v) {
    const double p = raw[v];
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
      throw InputError("p-value of vertex " + std::to_string(v) +
                       " is not a finite number in [0,1]: " + std::to_string(p));
  }

  SortedPValues sp;
  sp.m = raw.size();
  sp.alpha = alpha;
  std::vector<detail::Keyed> keyed(sp.m);
  for (std::size_t v = 0; v < sp.m; ++v)  // + 0.0 folds -0.0 into +0.0
    keyed[v] = {std::bit_cast<std::uint64_t>(raw[v] + 0.0), static_cast<VertexId>(v)};
  detail::bucket_sort(keyed);
  sp.perm.resize(sp.m);
  sp.rank_of.resize(sp.m);
  sp.values.resize(sp.m);
  for (std::size_t r = 0; r < sp.m; ++r) {
    sp.perm[r] = keyed[r].id;
    sp.values[r] = std::bit_cast<double>(keyed[r].key);
    sp.rank_of[keyed[r].id] = static_cast<Rank>(r);
  }
  return sp;
}

namespace detail {

// True when the pair (i, k) breaks the Simes condition defining h, i.e.
// i * p_k <= (k - m + i) * alpha with k the 1-based rank.
inline bool breaks_simes(double i, double p, double j, double alpha) {
  return !(i * p > j * alpha);
}

} // namespace detail

/// Largest i in {0..m} with i * p_{m-i+j} > j * alpha for all j in [i].
///
/// For a fixed value rank k the set of sizes i it rules out is upward closed,
/// so h + 1 is the minimum over k of the smallest excluded size. Each such
/// size is estimated in closed form and then settled with the exact
/// comparison used by the definition. Linear in m.
inline std::size_t compute_h(const SortedPValues& sp) {
  const std::size_t m = sp.m;
  const double alpha = sp.alpha;
  std::size_t first_bad = m + 1;

  for (std::size_t k = 1; k <= m; ++k) {
    const double p = sp.values[k - 1];
    const std::size_t t = m - k;  // size i must exceed t for k to be in range
    // Does size i violate at rank k?
    auto violates = [&](std::size_t i) {
      return detail::breaks_simes(static_cast<double>(i), p,
                                  static_cast<double>(i - t), alpha);
    };

    std::size_t lo = t + 1;
    if (lo >= first_bad)
      continue;  // cannot improve the minimum
    const double slack = alpha - p;
    std::size_t est;
    if (slack > 0.0) {
      const double need = std::ceil(static_cast<double>(t) * alpha / slack);
      est = need >= static_cast<double>(m + 1) ? m + 1
                                               : std::max(lo, static_cast<std::size_t>(need));
    } else {
      est = (t == 0 && slack == 0.0) ? lo : m + 1;
    }
    est = std::min(est, first_bad);
    while (est > lo && violates(est - 1))
      --est;
    while (est < first_bad && est <= m && !violates(est))
      ++est;
    if (est <= m && est < first_bad && violates(est))
      first_bad = est;
  }
  return first_bad - 1;
}

/// Rank cutoff such that d(S) = d(S ∩ [zeta]); 0 when h = m.
inline std::size_t compute_zeta(const SortedPValues& sp, std::size_t h) {
  const std::size_t m = sp.m;
  if (h >= m)
    return 0;
  const double hd = static_cast<double>(h);
  for (std::size_t v = m - h; v <= m; ++v) {
    const double j = static_cast<double>(v + h + 1 - m);
    if (hd * sp.values[v - 1] <= j * sp.alpha)
      return v;
  }
  // Unreachable for exact arithmetic; keeping every rank is always valid.
  return m;
}

/// c(v) = max{1, ceil(h p_v / alpha)}, computed so that
/// h * p_v <= j * alpha holds exactly when c(v) <= j.
inline std::vector<std::int64_t> discretize(const SortedPValues& sp, std::size_t h) {
  const double hd = static_cast<double>(h);
  const double alpha = sp.alpha;
  std::vector<std::int64_t> c(sp.m, 1);
  if (h == 0)
    return c;
  auto fits = [&](double p, std::int64_t j) {
    return hd * p <= static_cast<double>(j) * alpha;
  };
  for (std::size_t r = 0; r < sp.m; ++r) {
    const double p = sp.values[r];
    const double est = std::ceil(hd * p / alpha);
    if (est > 0x1p62) {  // only reachable for absurdly small alpha
      c[r] = std::int64_t{1} << 62;
      continue;
    }
    std::int64_t j = std::max<std::int64_t>(1, static_cast<std::int64_t>(est));
    while (j > 1 && fits(p, j - 1))
      --j;
    while (!fits(p, j))
      ++j;
    c[r] = j;
  }
  return c;
}

inline SimesContext make_simes_context(const SortedPValues& sp) {
  SimesContext ctx;
  ctx.alpha = sp.alpha;
  ctx.h = compute_h(sp);
  ctx.zeta = compute_zeta(sp, ctx.h);
  ctx.c = discretize(sp, ctx.h);
  return ctx;
}

// ---------------------------------------------------------------------------
// Direct evaluations. Quadratic; used for small sets and as test references.

/// |{v in S : c(v) <= j}| - j + 1 for a set of ranks S.
inline std::int64_t naive_delta(std::span<const Rank> set, std::int64_t j,
                                const SimesContext& ctx) {
  std::int64_t count = 0;
  for (Rank r : set)
    count += ctx.c[r] <= j ? 1 : 0;
  return count - j + 1;
}

inline std::int64_t naive_d(std::span<const Rank> set, const SimesContext& ctx) {
  std::int64_t best = 0;
  const auto n = static_cast<std::int64_t>(set.size());
  for (std::int64_t j = 1; j <= n; ++j)
    best = std::max(best, naive_delta(set, j, ctx));
  return best;
}

inline double naive_q(std::span<const Rank> set, const SimesContext& ctx) {
  if (set.empty())
    throw InputError("TDP bound is undefined for the empty set");
  return static_cast<double>(naive_d(set, ctx)) / static_cast<double>(set.size());
}

/// One-sided upper-tail normal p-value, clamped to (0, 1].
inline double z_to_p(double z) {
  if (!std::isfinite(z))
    throw InputError("z statistic is not finite");
  const double p = 0.5 * std::erfc(z / std::numbers::sqrt2);
  if (p <= 0.0)
    return std::numeric_limits<double>::denorm_min();
  return std::min(p, 1.0);
}

} // namespace ari

#endif // ARI_STATS_HPP
