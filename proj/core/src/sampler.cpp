#include "acim/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "acim/common.hpp"
#include "acim/ergodics.hpp"
#include "acim/transfer.hpp"

namespace acim {

TargetDistribution TargetDistribution::exponential() {
  // density e^(1-x)/(e-1); cdf C(1 - e^{-x}) with C = e/(e-1).
  const double C = std::exp(1.0) / (std::exp(1.0) - 1.0);
  TargetDistribution t;
  t.density = [](double x) { return std::exp(1.0 - x) / (std::exp(1.0) - 1.0); };
  t.cdf = [C](double x) { return C * (1.0 - std::exp(-x)); };
  t.inverse_cdf = [C](double u) { return -std::log1p(-u / C); };
  return t;
}

TargetDistribution TargetDistribution::uniform() {
  TargetDistribution t;
  t.density = [](double) { return 1.0; };
  t.cdf = [](double x) { return x; };
  t.inverse_cdf = [](double u) { return u; };
  t.identity_cdf = true;
  return t;
}

TargetDistribution TargetDistribution::from_density_cdf(std::function<double(double)> density,
                                                        std::function<double(double)> cdf) {
  TargetDistribution t;
  t.density = std::move(density);
  t.cdf = cdf;
  t.inverse_cdf = bisect_inverse(std::move(cdf), 0.0, 1.0, t.density);
  return t;
}

void TargetDistribution::check(std::size_t grid, double deriv_tol, double inverse_tol) const {
  if (!density || !cdf || !inverse_cdf)
    fail(errc::bad_config, "target distribution is missing a component");
  if (std::abs(cdf(0.0)) > 1e-12 || std::abs(cdf(1.0) - 1.0) > 1e-12)
    fail(errc::bad_config, "target cdf must run from 0 to 1");
  double prev = 0.0;
  for (std::size_t i = 0; i <= grid; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(grid);
    const double d = density(x);
    if (!(d > 0.0)) fail(errc::bad_config, "target density must be positive");
    const double c = cdf(x);
    if (i > 0 && c < prev - 1e-12) fail(errc::bad_config, "target cdf must be nondecreasing");
    prev = c;
    const double h = 1e-6;
    if (x > h && x < 1.0 - h) {
      const double diff = (cdf(x + h) - cdf(x - h)) / (2.0 * h);
      if (std::abs(diff - d) > deriv_tol * std::max(1.0, std::abs(d)))
        fail(errc::bad_config, "target cdf derivative disagrees with the density");
    }
    if (i < grid) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
      if (std::abs(cdf(inverse_cdf(u)) - u) > inverse_tol)
        fail(errc::bad_config, "target inverse cdf is not a right inverse of the cdf");
    }
  }
}

PiecewiseMap conjugated_map(const TargetDistribution& target, std::size_t k) {
  if (k < 2) fail(errc::bad_config, "conjugated map needs at least two branches");
  target.check();
  const double kd = static_cast<double>(k);
  std::vector<Branch> branches;
  branches.reserve(k);
  if (target.identity_cdf) {
    for (std::size_t j = 1; j <= k; ++j)
      branches.push_back(Branch::affine_vanishing((static_cast<double>(j) - 1.0) / kd,
                                                  static_cast<double>(j) / kd, kd));
    return PiecewiseMap(std::move(branches), std::nullopt, false, "uniform_conjugate");
  }
  const auto h = target.cdf;
  const auto hinv = target.inverse_cdf;
  const auto g = target.density;
  for (std::size_t j = 1; j <= k; ++j) {
    const double u0 = (static_cast<double>(j) - 1.0) / kd;
    const double u1 = static_cast<double>(j) / kd;
    const double a = j == 1 ? 0.0 : hinv(u0);
    const double b = j == k ? 1.0 : hinv(u1);
    AnalyticForm form;
    // Every branch is full, so pin the endpoints exactly: round-off in
    // hinv(h(a)) would otherwise leave the image a few ulp short of [0,1]
    // and endpoint preimages would go missing.
    form.forward = [h, hinv, kd, u0, a, b](double x) {
      if (x <= a) return 0.0;
      if (x >= b) return 1.0;
      return hinv(std::clamp(kd * (h(x) - u0), 0.0, 1.0));
    };
    form.derivative = [h, hinv, g, kd, u0](double x) {
      const double y = hinv(std::clamp(kd * (h(x) - u0), 0.0, 1.0));
      return kd * g(x) / g(y);
    };
    form.inverse = [h, hinv, kd, u0, a, b](double y) {
      return std::clamp(hinv(std::clamp(h(y) / kd + u0, 0.0, 1.0)), a, b);
    };
    branches.push_back(Branch::analytic(a, b, std::move(form)));
  }
  return PiecewiseMap(std::move(branches), std::nullopt, false, "conjugated");
}

double pf_fixed_point_check(const TargetDistribution& target, std::size_t k,
                            std::size_t points) {
  PiecewiseMap map = conjugated_map(target, k);
  double worst = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(points);
    const double pg = fp_pointwise(map, target.density, x, 1e-12).value;
    worst = std::max(worst, std::abs(pg - target.density(x)));
  }
  return worst;
}

std::vector<double> sample(const PiecewiseMap& map, double x0, std::size_t count,
                           std::size_t burn_in, std::uint64_t seed) {
  OrbitSampler orbit(map, x0, seed, 3);
  for (std::size_t t = 0; t < burn_in; ++t) orbit.next();
  std::vector<double> out(count);
  for (double& v : out) v = orbit.next();
  return out;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) fail(errc::empty_samples, "ks distance of an empty sample set");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    d = std::max(d, std::max(F - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - F));
  }
  return d;
}

double lag1_autocorrelation(const std::vector<double>& samples) {
  if (samples.size() < 2) fail(errc::empty_samples, "lag-1 autocorrelation needs two samples");
  double m = 0.0;
  for (double x : samples) m += x;
  m /= static_cast<double>(samples.size());
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < samples.size(); ++t) {
    const double d = samples[t] - m;
    den += d * d;
    if (t + 1 < samples.size()) num += d * (samples[t + 1] - m);
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace acim
