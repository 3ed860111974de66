#ifndef ARI_CHAIN_BOUNDS_HPP
#define ARI_CHAIN_BOUNDS_HPP

// TDN lower bounds for every prefix of an ascending chain V_1 ⊂ ... ⊂ V_l,
// given the discretised p-values of the chain's defining sequence.
//
// For prefix i the sequence f_i(k) = max_{j >= k} delta(V_i, j) is weakly
// decreasing in k with steps of exactly -1, so it is fully described by
// f_i(1) = d(V_i) and the partition of [l] into the intervals on which it
// is constant. Appending an element with value c <= l either raises f(1)
// (when c falls in the first interval) or merges c's interval into its left
// neighbour.

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ari/error.hpp"
#include "ari/stats.hpp"

namespace ari {

/// Partition of {1..n} into consecutive intervals supporting "which
/// interval holds k" and "merge interval with its left neighbour".
/// Union-find with path halving, union by size, and tracked minima.
class IntervalPartition {
public:
  IntervalPartition() = default;
  explicit IntervalPartition(std::size_t n) { reset(n); }

  /// Back to singletons {1},...,{n}. Reuses storage.
  void reset(std::size_t n) {
    n_ = n;
    link_.resize(n + 1);
    weight_.resize(n + 1);
    min_.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      link_[i] = static_cast<std::uint32_t>(i);
      weight_[i] = 1;
      min_[i] = static_cast<std::uint32_t>(i);
    }
  }

  std::size_t extent() const noexcept { return n_; }

  /// Representative of the interval containing k (1 <= k <= n).
  std::uint32_t find(std::uint32_t k) {
    while (link_[k] != k) {
      link_[k] = link_[link_[k]];
      k = link_[k];
    }
    return k;
  }

  std::uint32_t min_of(std::uint32_t interval) const { return min_[interval]; }

  /// Merges the interval (given by representative) with the one directly to
  /// its left. Returns the representative of the union.
  std::uint32_t merge_left(std::uint32_t interval) {
    const std::uint32_t left = find(min_[interval] - 1);
    std::uint32_t a = left, b = interval;
    if (weight_[a] < weight_[b])
      std::swap(a, b);
    link_[b] = a;
    weight_[a] += weight_[b];
    min_[a] = min_[left];
    return a;
  }

  /// Structural check: intervals are consecutive, disjoint, cover [1,n],
  /// and each knows its minimum. Linear; meant for tests and debug builds.
  bool check_invariants() {
    if (n_ == 0)
      return true;
    std::uint32_t current = find(1);
    if (min_[current] != 1)
      return false;
    std::vector<std::uint8_t> seen(n_ + 1, 0);
    seen[current] = 1;
    for (std::uint32_t k = 2; k <= n_; ++k) {
      const std::uint32_t r = find(k);
      if (r != current) {
        if (seen[r] || min_[r] != k)
          return false;  // interval reappears later, or wrong minimum
        seen[r] = 1;
        current = r;
      }
    }
    return true;
  }

private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> link_;
  std::vector<std::uint32_t> weight_;
  std::vector<std::uint32_t> min_;
};

namespace detail {

inline void check_chain_values(std::span<const std::int64_t> c) {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] < 1)
      throw InputError("discretised p-value at chain position " + std::to_string(i + 1) +
                       " must be at least 1");
}

} // namespace detail

/// Writes d(V_1..V_l) into out (out.size() == c.size()). The partition is
/// caller-owned scratch so repeated chains do not reallocate.
inline void compute_tdn_bounds(std::span<const std::int64_t> c, std::span<std::uint32_t> out,
                               IntervalPartition& scratch) {
  const std::size_t len = c.size();
  scratch.reset(len);
  std::uint32_t d = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const std::int64_t ci = c[i];
    if (ci <= static_cast<std::int64_t>(len)) {
      const std::uint32_t interval = scratch.find(static_cast<std::uint32_t>(ci));
      if (scratch.min_of(interval) == 1)
        ++d;
      else
        scratch.merge_left(interval);
    }
    out[i] = d;
  }
}

inline std::vector<std::uint32_t> compute_tdn_bounds(std::span<const std::int64_t> c) {
  detail::check_chain_values(c);
  std::vector<std::uint32_t> out(c.size());
  IntervalPartition scratch;
  compute_tdn_bounds(c, out, scratch);
  return out;
}

/// Same result, restricted to the elements whose rank is below zeta. The
/// bound of a prefix only depends on those members, so the shorter chain is
/// evaluated and its answers are mapped back to the original positions.
inline std::vector<std::uint32_t> compute_tdn_bounds_shrunk(std::span<const std::int64_t> c,
                                                            std::span<const Rank> ranks,
                                                            std::size_t zeta) {
  detail::check_chain_values(c);
  if (ranks.size() != c.size())
    throw InputError("chain values and ranks differ in length");
  std::vector<std::int64_t> kept;
  std::vector<std::size_t> kept_before(c.size() + 1, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (ranks[i] < zeta)
      kept.push_back(c[i]);
    kept_before[i + 1] = kept.size();
  }
  std::vector<std::uint32_t> reduced(kept.size());
  IntervalPartition scratch;
  compute_tdn_bounds(kept, reduced, scratch);
  std::vector<std::uint32_t> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    out[i] = kept_before[i + 1] == 0 ? 0 : reduced[kept_before[i + 1] - 1];
  return out;
}

/// Reference: max_j delta(V_i, j) per prefix by direct counting, O(l^2).
inline std::vector<std::uint32_t> naive_chain_bounds(std::span<const std::int64_t> c) {
  detail::check_chain_values(c);
  const std::size_t len = c.size();
  std::vector<std::uint32_t> out(len);
  std::vector<std::int64_t> at_most(len + 1, 0);  // at_most[j] = #{t <= i : c_t <= j}
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 1; j <= len; ++j)
      at_most[j] += c[i] <= static_cast<std::int64_t>(j) ? 1 : 0;
    std::int64_t best = 0;
    for (std::size_t j = 1; j <= len; ++j)
      best = std::max(best, at_most[j] - static_cast<std::int64_t>(j) + 1);
    out[i] = static_cast<std::uint32_t>(best);
  }
  return out;
}

} // namespace ari

#endif // ARI_CHAIN_BOUNDS_HPP
