#include "acim/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "acim/common.hpp"

namespace acim {

namespace {

bool detect_uniform(const std::vector<double>& t) {
  std::size_t m = t.size() - 1;
  if (m < 2) return true;
  double w = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j <= m; ++j) {
    if (std::abs(t[j] - static_cast<double>(j) * w) > 1e-15) return false;
  }
  return true;
}

}  // namespace

void StepFunction::finish() {
  if (t_.size() < 2 || v_.size() + 1 != t_.size())
    fail(errc::malformed_branch, "step function needs m+1 breakpoints for m values");
  if (t_.front() != 0.0 || t_.back() != 1.0)
    fail(errc::malformed_branch, "step function must span [0,1] exactly");
  for (std::size_t j = 1; j < t_.size(); ++j)
    if (!(t_[j] > t_[j - 1]))
      fail(errc::malformed_branch, "step function breakpoints must be strictly increasing");
  total_ = 0.0;
  for (std::size_t j = 0; j < v_.size(); ++j) total_ += v_[j] * (t_[j + 1] - t_[j]);
  uniform_ = detect_uniform(t_);
}

StepFunction::StepFunction() : t_{0.0, 1.0}, v_{0.0} { finish(); }

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values)
    : t_(std::move(breakpoints)), v_(std::move(values)) {
  finish();
}

StepFunction StepFunction::constant(double v) { return StepFunction({0.0, 1.0}, {v}); }

StepFunction StepFunction::indicator(double lo, double hi, double v) {
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  if (!(lo < hi)) fail(errc::malformed_branch, "indicator interval is empty");
  std::vector<double> t{0.0}, vals;
  if (lo > 0.0) {
    t.push_back(lo);
    vals.push_back(0.0);
  }
  t.push_back(hi < 1.0 ? hi : 1.0);
  vals.push_back(v);
  if (hi < 1.0) {
    t.push_back(1.0);
    vals.push_back(0.0);
  }
  return StepFunction(std::move(t), std::move(vals));
}

StepFunction StepFunction::density(std::vector<double> breakpoints, std::vector<double> values) {
  StepFunction f(std::move(breakpoints), std::move(values));
  if (!f.nonnegative()) fail(errc::malformed_branch, "density values must be non-negative");
  return f;
}

StepFunction StepFunction::centered_identity(std::size_t bins) {
  return discretize([](double x) { return x - 0.5; }, bins);
}

StepFunction StepFunction::discretize(const std::function<double(double)>& f, std::size_t bins) {
  if (bins == 0) fail(errc::malformed_branch, "discretize needs at least one bin");
  std::vector<double> t(bins + 1), v(bins);
  for (std::size_t j = 0; j <= bins; ++j) t[j] = static_cast<double>(j) / bins;
  t[bins] = 1.0;
  for (std::size_t j = 0; j < bins; ++j) v[j] = f((static_cast<double>(j) + 0.5) / bins);
  return StepFunction(std::move(t), std::move(v));
}

std::size_t StepFunction::piece_index(double x) const {
  if (x <= 0.0) return 0;
  if (x >= 1.0) return v_.size() - 1;
  if (uniform_) {
    auto j = static_cast<std::size_t>(x * static_cast<double>(v_.size()));
    if (j >= v_.size()) j = v_.size() - 1;
    // Guard rounding at piece edges.
    if (x < t_[j]) --j;
    else if (x >= t_[j + 1]) ++j;
    return j;
  }
  auto it = std::upper_bound(t_.begin(), t_.end(), x);
  return static_cast<std::size_t>(it - t_.begin()) - 1;
}

double StepFunction::value_at(double x) const { return v_[piece_index(x)]; }

double StepFunction::abs_integral() const {
  double s = 0.0;
  for (std::size_t j = 0; j < v_.size(); ++j) s += std::abs(v_[j]) * (t_[j + 1] - t_[j]);
  return s;
}

double StepFunction::max_value() const { return *std::max_element(v_.begin(), v_.end()); }
double StepFunction::min_value() const { return *std::min_element(v_.begin(), v_.end()); }

double StepFunction::sup_abs() const {
  double s = 0.0;
  for (double v : v_) s = std::max(s, std::abs(v));
  return s;
}

bool StepFunction::nonnegative(double tol) const {
  for (double v : v_)
    if (v < -tol) return false;
  return true;
}

bool StepFunction::non_increasing(double tol) const {
  for (std::size_t j = 1; j < v_.size(); ++j)
    if (v_[j] > v_[j - 1] + tol) return false;
  return true;
}

StepFunction StepFunction::scaled(double c) const {
  std::vector<double> v(v_);
  for (double& x : v) x *= c;
  return StepFunction(t_, std::move(v));
}

StepFunction StepFunction::normalized() const {
  if (!(total_ > 0.0)) fail(errc::malformed_branch, "cannot normalize: integral is not positive");
  return scaled(1.0 / total_);
}

StepFunction StepFunction::compacted() const {
  std::vector<double> t{t_[0]}, v;
  for (std::size_t j = 0; j < v_.size(); ++j) {
    if (!v.empty() && v.back() == v_[j]) {
      t.back() = t_[j + 1];
    } else {
      v.push_back(v_[j]);
      t.push_back(t_[j + 1]);
    }
  }
  return StepFunction(std::move(t), std::move(v));
}

double StepFunction::quantile(double u) const {
  if (!nonnegative(0.0) || !(total_ > 0.0))
    fail(errc::malformed_branch, "quantile needs a non-negative density with positive mass");
  if (u <= 0.0) u = 0.0;
  if (u >= 1.0) u = std::nextafter(1.0, 0.0);
  double target = u * total_;
  double acc = 0.0;
  for (std::size_t j = 0; j < v_.size(); ++j) {
    double piece = v_[j] * (t_[j + 1] - t_[j]);
    if (acc + piece >= target && piece > 0.0) {
      return t_[j] + (target - acc) / v_[j];
    }
    acc += piece;
  }
  return 1.0;
}

StepFunction merge_combine(const StepFunction& a, const StepFunction& b,
                           const std::function<double(double, double)>& op) {
  const auto& ta = a.breakpoints();
  const auto& tb = b.breakpoints();
  std::vector<double> t;
  t.reserve(ta.size() + tb.size());
  std::merge(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(t));
  t.erase(std::unique(t.begin(), t.end()), t.end());
  std::vector<double> v(t.size() - 1);
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    double mid = t[j] + 0.5 * (t[j + 1] - t[j]);
    v[j] = op(a.value_at(mid), b.value_at(mid));
  }
  return StepFunction(std::move(t), std::move(v));
}

StepFunction operator*(const StepFunction& a, const StepFunction& b) {
  return merge_combine(a, b, [](double x, double y) { return x * y; });
}
StepFunction operator+(const StepFunction& a, const StepFunction& b) {
  return merge_combine(a, b, [](double x, double y) { return x + y; });
}
StepFunction operator-(const StepFunction& a, const StepFunction& b) {
  return merge_combine(a, b, [](double x, double y) { return x - y; });
}

double inner(const StepFunction& a, const StepFunction& b) { return (a * b).integral(); }

double l1_distance(const StepFunction& a, const StepFunction& b) {
  return merge_combine(a, b, [](double x, double y) { return std::abs(x - y); }).integral();
}

double variation(const StepFunction& f) {
  const auto& v = f.values();
  double s = 0.0;
  for (std::size_t j = 1; j < v.size(); ++j) s += std::abs(v[j] - v[j - 1]);
  return s;
}

}  // namespace acim
