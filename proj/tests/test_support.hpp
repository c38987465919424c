#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "acim/rng.hpp"
#include "acim/step_function.hpp"

namespace acim::testing {

// Random partition of [0,1] into `pieces` intervals with distinct breakpoints.
inline std::vector<double> random_breakpoints(Rng& rng, std::size_t pieces) {
  std::vector<double> t{0.0, 1.0};
  while (t.size() < pieces + 1) {
    double x = rng.uniform(0.01, 0.99);
    bool dup = false;
    for (double v : t)
      if (std::abs(v - x) < 1e-6) dup = true;
    if (!dup) t.push_back(x);
  }
  std::sort(t.begin(), t.end());
  return t;
}

// Non-increasing probability density: descending positive levels, normalized.
inline StepFunction random_nonincreasing_density(Rng& rng, std::size_t pieces = 8) {
  auto t = random_breakpoints(rng, pieces);
  std::vector<double> v(pieces);
  double level = rng.uniform(1.0, 2.0);
  for (std::size_t j = 0; j < pieces; ++j) {
    v[j] = level;
    level *= rng.uniform(0.3, 1.0);
  }
  return StepFunction(std::move(t), std::move(v)).normalized();
}

// Signed step function with values in [-1, 1].
inline StepFunction random_step(Rng& rng, std::size_t pieces = 8) {
  auto t = random_breakpoints(rng, pieces);
  std::vector<double> v(pieces);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return StepFunction(std::move(t), std::move(v));
}

}  // namespace acim::testing
