#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "acim/piecewise_map.hpp"

namespace acim {

// A target law on [0,1] given by density, CDF and inverse CDF. The density
// must be positive; cdf(0) = 0 and cdf(1) = 1.
struct TargetDistribution {
  std::function<double(double)> density;
  std::function<double(double)> cdf;
  std::function<double(double)> inverse_cdf;
  bool identity_cdf = false;  // uniform law; conjugation degenerates to affine

  // The truncated exponential law with density e^(1-x)/(e-1).
  static TargetDistribution exponential();
  static TargetDistribution uniform();
  // Builds the inverse numerically (bisection + Newton) when absent.
  static TargetDistribution from_density_cdf(std::function<double(double)> density,
                                             std::function<double(double)> cdf);

  // Consistency checks on a grid: cdf' matches density (central differences)
  // and inverse_cdf is a right inverse of cdf. Throws errc::bad_config.
  void check(std::size_t grid = 64, double deriv_tol = 1e-6, double inverse_tol = 1e-10) const;
};

// The k-branch map conjugate to kx mod 1 by the target CDF h:
// branch j lives on [h^{-1}((j-1)/k), h^{-1}(j/k)) and maps x to
// h^{-1}(k h(x) - (j-1)). Its invariant density is the target density.
// An identity CDF yields exact affine branches.
PiecewiseMap conjugated_map(const TargetDistribution& target, std::size_t k);

// Max residual |P g - g| of the target density under the conjugated map,
// evaluated pointwise on a uniform grid.
double pf_fixed_point_check(const TargetDistribution& target, std::size_t k,
                            std::size_t points = 101);

// Orbit samples after burn-in, with the documented jitter policy.
std::vector<double> sample(const PiecewiseMap& map, double x0, std::size_t count,
                           std::size_t burn_in = 1024, std::uint64_t seed = 0);

// Two-sided Kolmogorov-Smirnov distance between samples and a CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

// Lag-1 autocorrelation of a sample sequence (orbit samples are dependent;
// this quantifies how much).
double lag1_autocorrelation(const std::vector<double>& samples);

}  // namespace acim
