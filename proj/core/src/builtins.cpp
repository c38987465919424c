#include "acim/builtins.hpp"

#include <cmath>
#include <utility>

#include "acim/common.hpp"
#include "acim/sampler.hpp"

namespace acim {

namespace {

Branch shifted_linear_branch(std::size_t i) {
  double di = static_cast<double>(i);
  double a = (di - 1.0) / di;
  double b = di / (di + 1.0);
  return Branch::affine_vanishing(a, b, di * (di + 1.0));
}

Branch harmonic_branch(std::size_t i) {
  double di = static_cast<double>(i);
  double a = 1.0 / (di + 1.0);
  double b = 1.0 / di;
  return Branch::affine_vanishing(a, b, di * (di + 1.0));
}

// Both families telescope: sum_{i>n} 1/(i(i+1)) = 1/(n+1), and the same value
// is the total tail domain length.
double telescoped_beyond(std::size_t n) { return 1.0 / (static_cast<double>(n) + 1.0); }

}  // namespace

PiecewiseMap shifted_linear_map() {
  std::vector<Branch> prefix;
  for (std::size_t i = 1; i <= 8; ++i) prefix.push_back(shifted_linear_branch(i));
  TailDescriptor tail;
  tail.generator = [](std::size_t i) { return shifted_linear_branch(i); };
  tail.slope_sum_beyond = telescoped_beyond;
  tail.length_beyond = telescoped_beyond;
  tail.hull_beyond = [](std::size_t n) {
    return std::make_pair(static_cast<double>(n) / (static_cast<double>(n) + 1.0), 1.0);
  };
  tail.full_affine = true;
  tail.max_index = std::size_t{1} << 26;
  return PiecewiseMap(std::move(prefix), std::move(tail), false, "shifted_linear");
}

PiecewiseMap harmonic_map() {
  std::vector<Branch> prefix;
  for (std::size_t i = 1; i <= 8; ++i) prefix.push_back(harmonic_branch(i));
  TailDescriptor tail;
  tail.generator = [](std::size_t i) { return harmonic_branch(i); };
  tail.slope_sum_beyond = telescoped_beyond;
  tail.length_beyond = telescoped_beyond;
  tail.hull_beyond = [](std::size_t n) {
    return std::make_pair(0.0, 1.0 / (static_cast<double>(n) + 1.0));
  };
  tail.full_affine = true;
  tail.max_index = std::size_t{1} << 26;
  return PiecewiseMap(std::move(prefix), std::move(tail), true, "harmonic");
}

PiecewiseMap three_branch_map() {
  std::vector<Branch> branches{
      Branch::affine(0.0, 0.25, 2.0, 0.0),
      Branch::affine(0.25, 0.5, 2.0, -0.5),
      Branch::affine(0.5, 1.0, 2.0, -1.0),
  };
  return PiecewiseMap(std::move(branches), std::nullopt, false, "three_branch");
}

PiecewiseMap doubling_map() {
  std::vector<Branch> branches{
      Branch::affine(0.0, 0.5, 2.0, 0.0),
      Branch::affine(0.5, 1.0, 2.0, -1.0),
  };
  return PiecewiseMap(std::move(branches), std::nullopt, false, "doubling");
}

PiecewiseMap conjugated_exp_map(std::size_t k) {
  return conjugated_map(TargetDistribution::exponential(), k);
}

PiecewiseMap builtin(const std::string& name, std::size_t k) {
  if (name == "shifted_linear") return shifted_linear_map();
  if (name == "harmonic") return harmonic_map();
  if (name == "three_branch") return three_branch_map();
  if (name == "doubling") return doubling_map();
  if (name == "conjugated_exp") return conjugated_exp_map(k);
  fail(errc::unknown_name, "no builtin map named '" + name + "'");
}

bool is_builtin_name(const std::string& name) {
  return name == "shifted_linear" || name == "harmonic" || name == "three_branch" ||
         name == "doubling" || name == "conjugated_exp";
}

}  // namespace acim
