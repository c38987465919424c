#pragma once

#include <cstddef>
#include <vector>

#include "acim/piecewise_map.hpp"

namespace acim {

// One branch of a first-return map in the coordinates of the base map.
struct ReturnBranch {
  std::size_t return_time = 0;
  double base_a = 0.0;   // domain inside [eps, 1]
  double base_b = 0.0;
  bool affine = false;
  double slope = 0.0;      // composed slope at the left endpoint
  double intercept = 0.0;  // set when affine (value = slope*x + intercept on [base_a, base_b))
};

struct FirstReturnResult {
  // The return map on [eps, 1], rescaled to [0, 1]. Its tail descriptor
  // records the mass not yet returned within max_return_time; that remainder
  // has no generator.
  PiecewiseMap map;
  double eps = 0.0;
  std::vector<ReturnBranch> branches;  // ordered by return time, then position
  double captured_fraction = 0.0;      // of the base interval [eps, 1]
  double unreturned_fraction = 0.0;
};

struct FirstReturnOptions {
  std::size_t max_return_time = 64;
  // The construction fails with errc::no_return_found when the captured
  // fraction stays below 1 - tail_tol.
  double tail_tol = 1e-8;
  std::size_t cell_cap = std::size_t{1} << 22;
};

FirstReturnResult first_return_map(const PiecewiseMap& map, double eps,
                                   const FirstReturnOptions& opt = {});

}  // namespace acim
