#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace acim {

// Right-continuous step function on [0,1]: value v_j on [t_{j-1}, t_j), with
// 0 = t_0 < ... < t_m = 1; the last piece also owns x == 1. Used both for
// densities (non-negative, validated by the density factory) and for signed
// step observables.
class StepFunction {
 public:
  StepFunction();  // constant 0
  StepFunction(std::vector<double> breakpoints, std::vector<double> values);

  static StepFunction constant(double v);
  // v on [lo, hi), 0 elsewhere (endpoints clamped into [0,1]).
  static StepFunction indicator(double lo, double hi, double v = 1.0);
  // Validating factory: rejects negative values.
  static StepFunction density(std::vector<double> breakpoints, std::vector<double> values);
  // x - 1/2 sampled at bin midpoints on a uniform grid; integral is 0.
  static StepFunction centered_identity(std::size_t bins);
  // f sampled at bin midpoints on a uniform grid.
  static StepFunction discretize(const std::function<double(double)>& f, std::size_t bins);

  const std::vector<double>& breakpoints() const { return t_; }
  const std::vector<double>& values() const { return v_; }
  std::size_t piece_count() const { return v_.size(); }

  double value_at(double x) const;
  std::size_t piece_index(double x) const;  // 0-based index of the piece owning x

  double integral() const { return total_; }      // signed
  double abs_integral() const;                    // L1 norm
  double max_value() const;
  double min_value() const;
  double sup_abs() const;

  bool nonnegative(double tol = 0.0) const;
  bool non_increasing(double tol = 1e-12) const;

  StepFunction scaled(double c) const;
  StepFunction normalized() const;  // divides by the integral (requires it > 0)

  // Piece boundaries collapse where neighboring values agree exactly.
  StepFunction compacted() const;

  // Quantile of the probability measure with this density (requires a
  // non-negative function with positive mass). u in [0,1).
  double quantile(double u) const;

 private:
  std::vector<double> t_;  // size m+1
  std::vector<double> v_;  // size m
  double total_ = 0.0;
  bool uniform_ = false;   // breakpoints form a uniform grid (fast lookup)
  void finish();
};

// Pointwise combination on the merged breakpoint set.
StepFunction merge_combine(const StepFunction& a, const StepFunction& b,
                           const std::function<double(double, double)>& op);
StepFunction operator*(const StepFunction& a, const StepFunction& b);
StepFunction operator+(const StepFunction& a, const StepFunction& b);
StepFunction operator-(const StepFunction& a, const StepFunction& b);

// Exact integrals against the Lebesgue measure.
double inner(const StepFunction& a, const StepFunction& b);  // integral of a*b
double l1_distance(const StepFunction& a, const StepFunction& b);

// Total variation over the open interval: sum of interior jumps only.
// Endpoint values do not count as jumps to the outside.
double variation(const StepFunction& f);

}  // namespace acim
