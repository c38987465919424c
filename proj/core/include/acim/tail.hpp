#pragma once

#include <cstddef>
#include <functional>
#include <utility>

#include "acim/branch.hpp"

namespace acim {

// Summability data for the branches of an infinite family beyond a stored
// prefix. All index arguments are counts of already materialized branches,
// i.e. slope_sum_beyond(n) bounds the sum of 1/tau'(a_i) over branches with
// index > n (1-based indexing).
//
// A descriptor without a generator records the remainder of a construction
// that was truncated (first-return maps): the bounds stay meaningful but no
// further branches can be produced.
struct TailDescriptor {
  // Produces branch number i (1-based). Null for recorded remainders.
  std::function<Branch(std::size_t)> generator;

  // Upper bound on the reciprocal slope sum of all branches beyond the first n.
  std::function<double(std::size_t)> slope_sum_beyond;

  // Total length of the domains of all branches beyond the first n.
  std::function<double(std::size_t)> length_beyond;

  // Interval hull of the domains of all branches beyond the first n.
  std::function<std::pair<double, double>(std::size_t)> hull_beyond;

  // True when every tail branch is affine with image exactly [0, 1). This
  // enables closed-form tail corrections in the transfer operator and exact
  // tail rows in Ulam matrices.
  bool full_affine = false;

  // The generator refuses indices beyond this bound.
  std::size_t max_index = std::size_t{1} << 20;
};

}  // namespace acim
