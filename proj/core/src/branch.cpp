#include "acim/branch.hpp"

#include <cmath>
#include <utility>

#include "acim/common.hpp"

namespace acim {

Branch Branch::affine(double a, double b, double slope, double intercept) {
  if (!(a < b)) fail(errc::malformed_branch, "branch domain is empty or reversed");
  if (!(slope > 0.0)) fail(errc::malformed_branch, "affine branch needs positive slope");
  Branch br;
  br.a_ = a;
  br.b_ = b;
  br.slope_ = slope;
  br.intercept_ = intercept;
  br.image_left_ = slope * a + intercept;
  br.image_right_ = slope * b + intercept;
  return br;
}

Branch Branch::analytic(double a, double b, AnalyticForm form) {
  if (!(a < b)) fail(errc::malformed_branch, "branch domain is empty or reversed");
  if (!form.forward || !form.derivative || !form.inverse)
    fail(errc::malformed_branch, "analytic branch needs forward, derivative and inverse");
  Branch br;
  br.a_ = a;
  br.b_ = b;
  br.analytic_ = std::make_shared<const AnalyticForm>(std::move(form));
  br.image_left_ = br.analytic_->forward(a);
  br.image_right_ = br.analytic_->forward(b);
  return br;
}

std::function<double(double)> bisect_inverse(std::function<double(double)> forward,
                                             double lo, double hi,
                                             std::function<double(double)> derivative,
                                             double tol) {
  return [forward = std::move(forward), derivative = std::move(derivative), lo, hi,
          tol](double y) {
    double left = lo, right = hi;
    double fl = forward(left) - y;
    if (fl >= 0.0) return left;
    if (forward(right) - y <= 0.0) return right;
    for (int it = 0; it < 200 && right - left > tol; ++it) {
      double mid = 0.5 * (left + right);
      double fm = forward(mid) - y;
      if (derivative) {
        // One guarded Newton step from the midpoint; keep it only if it
        // stays inside the bracket.
        double d = derivative(mid);
        if (d > 0.0) {
          double cand = mid - fm / d;
          if (cand > left && cand < right) {
            double fc = forward(cand) - y;
            if (fc == 0.0) return cand;
            if (fc < 0.0) left = cand; else right = cand;
            continue;
          }
        }
      }
      if (fm < 0.0) left = mid; else right = mid;
    }
    return 0.5 * (left + right);
  };
}

}  // namespace acim
