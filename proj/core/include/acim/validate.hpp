#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "acim/piecewise_map.hpp"

namespace acim {

// One failed admissibility condition, tied to a branch where applicable.
struct Violation {
  std::string condition;   // "monotone", "convex", "vanishing-left", "slope-sum",
                           // "contraction", "inverse", "image", "coverage", "origin-branch"
  std::size_t branch = 0;  // 1-based, 0 for map-level findings
  std::string detail;
};

// Admissibility report. alpha is the contraction coefficient of the sup-norm
// inequality: 1/tau'(0) when the branch partition does not accumulate at 0,
// otherwise the reciprocal-slope sum of the branches left of the cut point r.
struct ClassReport {
  bool in_T = false;             // admissible family (convex expanding, summable slopes)
  bool in_TE = false;            // uniformly expanding: sup 1/tau' < 1
  double alpha = 0.0;
  std::optional<double> r;       // cut point, set in the accumulating case
  bool r_relaxed = false;        // no cut point reached <= 1/2; best value < 1 recorded
  double beta = 0.0;             // sup over branches of 1/tau'(a_i)
  double slope_sum = 0.0;        // sum of 1/tau'(a_i), tail bound folded in
  bool accumulates_at_zero = false;
  std::size_t branches_checked = 0;
  bool finite_family = true;
  std::vector<Violation> violations;
};

struct ValidateOptions {
  std::size_t grid = 64;         // sample points per branch
  double tail_tol = 1e-8;        // drives how deep the prefix is materialized
  std::size_t check_limit = 512; // per-branch grid checks run on at most this many branches
};

ClassReport validate(const PiecewiseMap& map, const ValidateOptions& opt = {});

// Cut point selection for families accumulating at 0: the largest materialized
// partition endpoint r with reciprocal-slope sum of {branches left of r} <= 1/2,
// falling back to the smallest attainable sum < 1.
struct CutPoint {
  double r = 0.0;
  double alpha = 0.0;
  bool relaxed = false;
  bool found = false;
};
CutPoint select_cut_point(const PiecewiseMap& map, double tail_tol);

}  // namespace acim
