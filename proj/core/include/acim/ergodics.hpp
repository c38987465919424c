#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "acim/piecewise_map.hpp"
#include "acim/rng.hpp"
#include "acim/step_function.hpp"

namespace acim {

// Orbit iterator with the documented jitter policy: after every application a
// uniform perturbation of magnitude `jitter` is injected (seeded), keeping
// orbits of dyadic affine maps off the collapsing dyadic lattice. Guards
// against leaving [0,1] by more than 1e-9.
class OrbitSampler {
 public:
  OrbitSampler(PiecewiseMap map, double x0, std::uint64_t seed, std::uint64_t stream = 0,
               double jitter = 1e-13);
  double x() const { return x_; }
  double next();  // advances one step and returns the new point

 private:
  PiecewiseMap map_;
  double x_;
  double jitter_;
  Rng rng_;
};

enum class CorrMethod { exact_matrix, orbit_average };

struct CorrelationReport {
  std::vector<double> values;  // C_0 .. C_n_max
  CorrMethod method = CorrMethod::exact_matrix;
  double q_fit = 0.0;
  double prefactor = 0.0;
  bool fit_degenerate = false;
  double orbit_se = 0.0;  // standard error estimate (orbit method only)
};

// Correlation sequence C_n = int f (g o tau^n) dmu - int f dmu int g dmu for
// the measure with density mu. The exact method pushes f*mu through the
// transfer operator (affine branches only); the orbit method averages along a
// jittered orbit of length orbit_len after burn_in steps.
CorrelationReport correlations(const PiecewiseMap& map, const StepFunction& mu,
                               const StepFunction& f, const StepFunction& g,
                               std::size_t n_max, CorrMethod method,
                               double tail_tol = 1e-8, std::size_t orbit_len = 1000000,
                               std::size_t burn_in = 1000, std::uint64_t seed = 0);

// Least-squares fit of log |values[n]| = log H + n log q over n in [lo, hi],
// skipping entries below the floor 1e-14. Returns (q, H); degenerate when
// fewer than two points survive.
struct DecayFit {
  double q = 0.0;
  double H = 0.0;
  bool degenerate = false;
};
DecayFit fit_decay(const std::vector<double>& values, std::size_t lo, std::size_t hi);

// Birkhoff average of f along a jittered orbit.
double birkhoff(const PiecewiseMap& map, const std::function<double(double)>& f, double x0,
                std::size_t n, std::size_t burn_in = 1000, std::uint64_t seed = 0);

// Distribution of normalized Birkhoff sums S_n/sqrt(n) over independent starts
// drawn from mu by inverse transform sampling. f must be centered under mu.
struct CltReport {
  double sigma2 = 0.0;
  double normal_distance = 0.0;  // sup distance between the empirical CDF and N(0, sigma2)
  double green_kubo = 0.0;       // C_0 + 2 sum_{k>=1} C_k
  bool degenerate = false;       // sigma2 at numerical zero
  std::size_t n = 0;
  std::size_t samples = 0;
  std::vector<double> sums;      // the normalized sums
};
CltReport clt_probe(const PiecewiseMap& map, const StepFunction& mu, const StepFunction& f,
                    std::size_t n, std::size_t samples, std::uint64_t seed = 0,
                    std::size_t gk_n_max = 24, double tail_tol = 1e-8);

// Standard normal CDF.
double normal_cdf(double x);

}  // namespace acim
