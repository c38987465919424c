#pragma once

#include <functional>
#include <optional>

#include "acim/piecewise_map.hpp"
#include "acim/step_function.hpp"

namespace acim {

// Result of pushing a step function through the transfer operator. For maps
// whose tail branches are affine with full image the tail contribution is a
// closed form and tail_bound is 0 (exact up to rounding); otherwise the
// dropped tail is bounded by tail_bound.
struct Pushforward {
  StepFunction density;
  double mass_in = 0.0;
  double mass_out = 0.0;
  double tail_bound = 0.0;
};

// Exact action of the transfer operator on a step function. Every branch used
// must be affine; analytic branches raise errc::non_affine_branch.
Pushforward fp_step(const PiecewiseMap& map, const StepFunction& f, double tail_tol = 1e-8);

struct PointValue {
  double value = 0.0;
  double tail_bound = 0.0;
};

// Pointwise transfer operator value: sum of f(y)/tau'(y) over preimages y of x.
PointValue fp_pointwise(const PiecewiseMap& map, const StepFunction& f, double x,
                        double tail_tol = 1e-8);
PointValue fp_pointwise(const PiecewiseMap& map, const std::function<double(double)>& f,
                        double x, double tail_tol = 1e-8);

// Checks that the operator maps non-increasing input to non-increasing output.
// Exact on the pushforward breakpoints for affine maps; for maps with analytic
// branches the output is sampled at image points of the input breakpoints plus
// a uniform grid. The input must itself be non-increasing or
// errc::input_not_monotone is raised.
struct MonotoneCheck {
  bool pass = true;
  double at_left = 0.0, at_right = 0.0;  // witness pair when pass is false
  double value_left = 0.0, value_right = 0.0;
};
MonotoneCheck monotone_check(const PiecewiseMap& map, const StepFunction& f,
                             double tail_tol = 1e-8);

// Constants of the sup-norm inequality ||Pf||_inf <= alpha ||f||_inf + D ||f||_1
// for non-increasing densities, and the derived K = 1 + D/(1 - alpha).
struct LyConstants {
  double alpha = 0.0;
  double D = 0.0;
  double K = 0.0;
  std::optional<double> r;         // cut point in the accumulating case
  double truncation_bound = 0.0;   // slack added to D by tail truncation
};
LyConstants ly_constants(const PiecewiseMap& map, double tail_tol = 1e-8);

// Evaluates both sides of the sup-norm inequality for one non-increasing f.
struct SupBoundCheck {
  bool pass = false;
  double lhs = 0.0;   // sup of the pushforward (attained at 0 for monotone input)
  double rhs = 0.0;   // alpha ||f||_inf + D ||f||_1
  double slack = 0.0; // rhs - lhs
};
SupBoundCheck sup_bound_check(const PiecewiseMap& map, const StepFunction& f,
                              const LyConstants& c, double tail_tol = 1e-8);

// The uniform lower bound (1/2 on [0, 1/(2K))) that iterates of normalized
// non-increasing densities eventually dominate.
StepFunction lower_function(const LyConstants& c);

// True when f >= h at every point of [0, hi_limit) up to tol (checked on the
// merged breakpoints; both are step functions so this is exact).
bool dominates(const StepFunction& f, const StepFunction& h, double hi_limit, double tol = 1e-12);

// First n1 <= n_max such that P^n f dominates the lower function for every
// n in [n1, n_max]. found is false when even n_max fails.
struct DominationScan {
  bool found = false;
  std::size_t n1 = 0;
};
DominationScan find_domination_order(const PiecewiseMap& map, const StepFunction& f,
                                     const StepFunction& h, std::size_t n_max,
                                     double tail_tol = 1e-8);

}  // namespace acim
