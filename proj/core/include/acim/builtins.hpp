#pragma once

#include <cstddef>
#include <string>

#include "acim/piecewise_map.hpp"

namespace acim {

// Interval exchange with branches ((i-1)/i, i/(i+1)) and slope i(i+1); the
// branch domains shrink toward 1. Lebesgue measure is invariant.
PiecewiseMap shifted_linear_map();

// Branches (1/(i+1), 1/i) with slope i(i+1); the partition accumulates at 0.
// Lebesgue measure is invariant.
PiecewiseMap harmonic_map();

// Three affine branches 2x, 2x - 1/2, 2x - 1 on [0,1/4), [1/4,1/2), [1/2,1].
// The invariant density is 2 on [0,1/2).
PiecewiseMap three_branch_map();

// 2x mod 1.
PiecewiseMap doubling_map();

// k-branch expanding map conjugate to kx mod 1 by the cumulative distribution
// of the truncated exponential density e^(1-x)/(e-1); that density is its
// invariant density. Declared in sampler.hpp where the target distribution
// lives; redeclared here for the builtin registry.
PiecewiseMap conjugated_exp_map(std::size_t k);

// Lookup by name: "shifted_linear", "harmonic", "three_branch", "doubling",
// "conjugated_exp" (uses k). Throws errc::unknown_name otherwise.
PiecewiseMap builtin(const std::string& name, std::size_t k = 2);

bool is_builtin_name(const std::string& name);

}  // namespace acim
