#pragma once

#include <algorithm>
#include <cstddef>

#include "acim/piecewise_map.hpp"

namespace acim::detail {

// Smallest prefix length (capped) whose tail *length* is <= tol; materializes
// up to it. Mirrors PiecewiseMap::ensure_slope_sum but drives partitions and
// bin matrices, where the controlled quantity is leftover measure.
inline std::size_t ensure_tail_length(const PiecewiseMap& map, double tol, std::size_t cap) {
  if (map.finite()) return map.stored_count();
  std::size_t n = map.stored_count();
  if (map.tail_length(n) <= tol) return n;
  if (!map.tail()->generator) return n;  // recorded remainder, nothing to grow
  cap = std::min(cap, map.tail()->max_index);
  std::size_t lo = n, hi = std::max<std::size_t>(n * 2, 16);
  while (hi < cap && map.tail_length(hi) > tol) {
    lo = hi;
    hi *= 2;
  }
  hi = std::min(hi, cap);
  while (lo + 1 < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (map.tail_length(mid) > tol) lo = mid; else hi = mid;
  }
  return map.ensure_count(hi);
}

// Branch indices (1-based) in spatial order: ascending left endpoint.
inline std::vector<std::size_t> spatial_order(const PiecewiseMap& map) {
  std::size_t n = map.stored_count();
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) keyed.emplace_back(map.branch(i).a(), i);
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> order;
  order.reserve(n);
  for (const auto& [a, i] : keyed) order.push_back(i);
  return order;
}

}  // namespace acim::detail
