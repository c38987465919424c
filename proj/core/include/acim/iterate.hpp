#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "acim/piecewise_map.hpp"

namespace acim {

// One cell of the monotonicity partition of an iterate: the composition of
// `path` (outermost applied first) is monotone on [left, right) and sends
// left to 0. slope_left is the chain-rule derivative at the left endpoint,
// which is the infimum over the cell for convex branches.
struct IterateCell {
  double left = 0.0;
  double right = 0.0;
  std::vector<std::uint32_t> path;  // 1-based branch indices
  double slope_left = 0.0;
};

struct IteratePartition {
  std::size_t n = 0;
  std::vector<IterateCell> cells;
  double mesh = 0.0;              // max cell length, tail bound folded in
  double min_slope = 0.0;         // inf of the iterate's derivative over all cells
  bool min_slope_sound = false;   // true when the tail cannot undercut min_slope
  double truncation_error = 0.0;  // total length not covered by the cells
};

struct IterateOptions {
  double tail_tol = 1e-8;
  std::size_t cell_cap = std::size_t{1} << 22;
};

// Monotonicity partition of the n-th iterate, built by pulling the (n-1)
// partition back through each materialized branch.
IteratePartition iterate_partition(const PiecewiseMap& map, std::size_t n,
                                   const IterateOptions& opt = {});

// Mesh of the iterate partitions for n = 1..n_max.
std::vector<double> mesh_decay(const PiecewiseMap& map, std::size_t n_max,
                               const IterateOptions& opt = {});

// Smallest n with inf (tau^n)' >= target, searched up to n_cap.
struct SlopeCertificate {
  bool found = false;
  std::size_t n = 0;
  double min_slope = 0.0;
};
SlopeCertificate min_slope_certificate(const PiecewiseMap& map, double target,
                                       std::size_t n_cap = 32, const IterateOptions& opt = {});

// Forward evaluation and chain-rule derivative of a composition path.
double compose_value(const PiecewiseMap& map, const std::vector<std::uint32_t>& path, double x);
double compose_derivative(const PiecewiseMap& map, const std::vector<std::uint32_t>& path,
                          double x);

}  // namespace acim
