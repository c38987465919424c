#pragma once

#include <cstdint>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "acim/piecewise_map.hpp"
#include "acim/step_function.hpp"

namespace acim {

// Row-stochastic bin-transition matrix on N uniform bins:
// entry[j][k] = m(B_j intersect tau^{-1} B_k) / m(B_j). Mass that escapes into
// unmaterialized tail branches is never renormalized away; it is carried per
// row in row_defect.
struct UlamMatrix {
  std::size_t bins = 0;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;  // sorted by column
  std::vector<double> row_defect;

  double row_sum(std::size_t j) const;
  // y = x M (left action).
  void apply_left(const std::vector<double>& x, std::vector<double>& y) const;
  // y = M x (right action).
  void apply_right(const std::vector<double>& x, std::vector<double>& y) const;
  double max_defect() const;
};

UlamMatrix build_ulam(const PiecewiseMap& map, std::size_t bins, double tail_tol = 1e-8);

// Left fixed vector by power iteration, renormalized to a probability vector
// each step. Returns the bin masses; residual is the L1 distance between the
// last two normalized iterates.
struct PowerResult {
  std::vector<double> masses;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};
PowerResult invariant_masses(const UlamMatrix& m, double tol = 1e-12,
                             std::size_t max_iter = 100000);

// Invariant density as a step function on the bin grid (masses * bins).
StepFunction masses_to_density(const std::vector<double>& masses);

// Magnitude of the subdominant eigenvalue by power iteration on the
// complement of the fixed pair: the candidate is projected off the invariant
// direction every step. Estimates the magnitude from the growth ratio of
// consecutive iterates (geometric mean of the last two ratios, so complex
// pairs settle too).
struct EigenEstimate {
  double lambda2_abs = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};
EigenEstimate second_eigenvalue(const UlamMatrix& m, const std::vector<double>& pi,
                                double tol = 1e-10, std::size_t max_iter = 100000,
                                std::uint64_t seed = 1);

// Measures the decay of ||u M^n||_1 over zero-mean test vectors (alternating
// combs plus seeded random vectors) and fits a geometric envelope H q^n.
struct GapProbe {
  double q_fit = 0.0;
  double H_fit = 0.0;
  bool degenerate = false;  // fewer than two usable points above the floor
  std::vector<double> envelope;  // max over test vectors, per n
};
GapProbe spectral_gap_probe(const UlamMatrix& m, std::size_t n_max = 12,
                            std::uint64_t seed = 7, std::size_t n_random = 8);

// Everything the spectrum artifact needs.
struct SpectralReport {
  StepFunction density;
  double lambda2_abs = 0.0;
  double q_fit = 0.0;
  double H_fit = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = true;
  bool degenerate_fit = false;
  double max_defect = 0.0;
};
SpectralReport spectral_report(const PiecewiseMap& map, std::size_t bins, double tol = 1e-12,
                               std::size_t max_iter = 100000, double tail_tol = 1e-8,
                               std::uint64_t seed = 1);

// Empirical constants for the variation inequality
// var(P^n f) <= (1/2) var(f) + B_n ||f||_1 over a family of step functions:
// seeded random ones plus deterministic indicators and alternating combs.
struct LyProbeReport {
  std::size_t n = 0;
  double B_n_est = 0.0;   // clamped at 0
  double C_est = 0.0;     // 1/2 + B_n_est
  StepFunction worst;     // maximizer
  double worst_ratio = 0.0;
  bool expansion_certified = true;  // n at or above the min-slope certificate order
  std::size_t family_size = 0;
};
LyProbeReport ly_probe(const PiecewiseMap& map, std::size_t n, std::size_t n_random = 32,
                       double tail_tol = 1e-8, std::uint64_t seed = 11);

// Coordinate-format export: one "row col value" line per entry (0-based).
void export_matrix(const UlamMatrix& m, std::ostream& os);

}  // namespace acim
