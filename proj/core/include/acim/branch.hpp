#pragma once

#include <functional>
#include <memory>

namespace acim {

// Closed-form callables for a non-affine branch. forward must be defined on
// the closure [a, b], inverse on the closure of the image.
struct AnalyticForm {
  std::function<double(double)> forward;
  std::function<double(double)> derivative;
  std::function<double(double)> inverse;
};

// One monotone branch of an interval map: an increasing convex function on
// the half-open domain [a, b) (the spatially last branch also owns x == b).
// Affine branches store slope and intercept and support exact arithmetic;
// analytic branches carry their closed forms.
class Branch {
 public:
  Branch() = default;

  static Branch affine(double a, double b, double slope, double intercept);
  // Affine branch pinned to 0 at its left endpoint.
  static Branch affine_vanishing(double a, double b, double slope) {
    return affine(a, b, slope, -slope * a);
  }
  static Branch analytic(double a, double b, AnalyticForm form);

  double a() const { return a_; }
  double b() const { return b_; }
  double length() const { return b_ - a_; }
  bool is_affine() const { return analytic_ == nullptr; }
  double slope() const { return slope_; }          // affine only
  double intercept() const { return intercept_; }  // affine only

  double image_left() const { return image_left_; }
  double image_right() const { return image_right_; }

  double value(double x) const {
    return analytic_ ? analytic_->forward(x) : slope_ * x + intercept_;
  }
  double derivative(double x) const {
    return analytic_ ? analytic_->derivative(x) : slope_;
  }
  double inverse(double y) const {
    return analytic_ ? analytic_->inverse(y) : (y - intercept_) / slope_;
  }

  // Derivative at the left endpoint: for convex branches this is the infimum
  // of the derivative over the domain.
  double min_derivative() const { return derivative(a_); }

  bool contains(double x, bool closed_right) const {
    return x >= a_ && (x < b_ || (closed_right && x <= b_));
  }
  bool image_contains(double y, bool closed_right) const {
    return y >= image_left_ && (y < image_right_ || (closed_right && y <= image_right_));
  }

 private:
  double a_ = 0.0;
  double b_ = 1.0;
  double slope_ = 1.0;
  double intercept_ = 0.0;
  double image_left_ = 0.0;
  double image_right_ = 1.0;
  std::shared_ptr<const AnalyticForm> analytic_;
};

// Monotone bisection inverse on [lo, hi], refined by Newton steps when the
// derivative is supplied. Used to complete analytic forms that only come
// with a forward map.
std::function<double(double)> bisect_inverse(std::function<double(double)> forward,
                                             double lo, double hi,
                                             std::function<double(double)> derivative = {},
                                             double tol = 1e-14);

}  // namespace acim
