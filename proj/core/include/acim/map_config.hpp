#pragma once

#include <cstddef>
#include <string>

#include "acim/piecewise_map.hpp"

namespace acim {

// Loads a map description from a JSON file. Recognized forms:
//   {"kind": "three_branch" | "doubling" | "shifted_linear" | "harmonic"}
//   {"kind": "conjugated_exp", "k": 5}
//   {"kind": "linear", "branches": [{"a":0,"b":0.5,"slope":2,"intercept":0}, ...]}
//   {"kind": "first_return", "base": {...}, "eps": 0.5}
// "intercept" may be omitted (the branch is then pinned to 0 at its left
// endpoint). Unknown keys are rejected with errc::bad_config.
// max_return_time bounds the construction depth of first_return kinds.
PiecewiseMap load_map_file(const std::string& path, std::size_t max_return_time = 64,
                           double tail_tol = 1e-8);

// Same, from a JSON string (used by tests).
PiecewiseMap load_map_json(const std::string& text, std::size_t max_return_time = 64,
                           double tail_tol = 1e-8);

}  // namespace acim
