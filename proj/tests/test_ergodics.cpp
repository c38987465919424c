#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "acim/builtins.hpp"
#include "acim/common.hpp"
#include "acim/ergodics.hpp"
#include "test_support.hpp"

using namespace acim;

TEST_CASE("orbit sampler is reproducible and stays near the true orbit") {
  OrbitSampler a(doubling_map(), 0.3, 7);
  OrbitSampler b(doubling_map(), 0.3, 7);
  PiecewiseMap map = doubling_map();
  double x = 0.3;
  for (int t = 0; t < 200; ++t) {
    double ya = a.next();
    CHECK(ya == b.next());
    // jitter policy: at most 1e-13 away from the exact image, then clamped
    double exact = map.apply(x).value;
    CHECK(std::abs(ya - std::clamp(exact, 0.0, 1.0)) <= 2e-13);
    x = ya;
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  OrbitSampler c(doubling_map(), 0.3, 7, /*stream=*/1);
  bool differs = false;
  OrbitSampler a2(doubling_map(), 0.3, 7);
  for (int t = 0; t < 200 && !differs; ++t) differs = (c.next() != a2.next());
  CHECK(differs);
}

TEST_CASE("jitter keeps dyadic orbits off the collapsing lattice") {
  // exact doubling from a dyadic start hits 0 after finitely many steps and
  // stays there; the jittered orbit must keep moving
  OrbitSampler orbit(doubling_map(), 0.375, 3);
  for (int t = 0; t < 60; ++t) orbit.next();
  int zeros = 0;
  for (int t = 0; t < 60; ++t)
    if (orbit.next() == 0.0) ++zeros;
  CHECK(zeros <= 1);
}

TEST_CASE("exact correlations of the doubling map match the closed form") {
  const std::size_t bins = 256;
  StepFunction mu = StepFunction::constant(1.0);
  StepFunction f = StepFunction::centered_identity(bins);
  CorrelationReport rep =
      correlations(doubling_map(), mu, f, f, 12, CorrMethod::exact_matrix);
  const double n2 = static_cast<double>(bins) * static_cast<double>(bins);
  // variance of the centered bin midpoints
  CHECK(rep.values[0] == doctest::Approx((1.0 - 1.0 / n2) / 12.0).epsilon(1e-13));
  // one application halves the identity part; the correction term quadruples
  CHECK(rep.values[1] == doctest::Approx((1.0 - 4.0 / n2) / 24.0).epsilon(1e-13));
  CHECK(rep.values[2] / rep.values[1] == doctest::Approx(0.5).epsilon(5e-3));
  CHECK(rep.q_fit > 0.45);
  CHECK(rep.q_fit < 0.55);
  CHECK(rep.prefactor > 0.0);
  CHECK_FALSE(rep.fit_degenerate);
  CHECK(rep.method == CorrMethod::exact_matrix);
}

TEST_CASE("orbit averages agree with the exact values") {
  const std::size_t bins = 64;
  StepFunction mu = StepFunction::constant(1.0);
  StepFunction f = StepFunction::centered_identity(bins);
  CorrelationReport exact =
      correlations(doubling_map(), mu, f, f, 4, CorrMethod::exact_matrix);
  CorrelationReport orbit = correlations(doubling_map(), mu, f, f, 4,
                                          CorrMethod::orbit_average, 1e-8, 200000, 1000, 5);
  CHECK(orbit.orbit_se > 0.0);
  CHECK(orbit.orbit_se < 0.01);
  for (std::size_t n = 0; n <= 4; ++n) {
    INFO("lag " << n);
    CHECK(std::abs(orbit.values[n] - exact.values[n]) <= 0.005);
  }
}

TEST_CASE("orbit correlations reject lags beyond the orbit") {
  StepFunction f = StepFunction::centered_identity(8);
  CHECK_THROWS_AS(correlations(doubling_map(), StepFunction::constant(1.0), f, f, 10,
                               CorrMethod::orbit_average, 1e-8, /*orbit_len=*/8),
                  error);
}

TEST_CASE("decay fit recovers exact geometric data") {
  std::vector<double> v(11);
  for (std::size_t n = 0; n <= 10; ++n) v[n] = 3.0 * std::pow(0.7, static_cast<double>(n));
  DecayFit fit = fit_decay(v, 0, 10);
  CHECK_FALSE(fit.degenerate);
  CHECK(fit.q == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fit.H == doctest::Approx(3.0).epsilon(1e-10));

  // signs are ignored, entries under the floor are skipped
  std::vector<double> w{1.0, -0.5, 1e-20, -0.125, 0.0625};
  DecayFit fw = fit_decay(w, 1, 4);
  CHECK_FALSE(fw.degenerate);
  CHECK(fw.q == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("decay fit degenerates honestly") {
  CHECK(fit_decay({}, 0, 10).degenerate);
  CHECK(fit_decay({1.0, 1e-16, 1e-16, 1e-16}, 0, 3).degenerate);
  CHECK(fit_decay({1.0, 0.5}, 1, 1).degenerate);  // single usable point
  DecayFit flat = fit_decay({1.0, 1.0, 1.0, 1.0}, 0, 3);
  CHECK_FALSE(flat.degenerate);
  CHECK(flat.q == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("birkhoff averages converge to the space average") {
  double m1 = birkhoff(doubling_map(), [](double x) { return x; }, 0.3, 200000);
  CHECK(std::abs(m1 - 0.5) <= 0.01);
  double m2 = birkhoff(harmonic_map(), [](double x) { return x; }, 0.7, 100000);
  CHECK(std::abs(m2 - 0.5) <= 0.02);
  CHECK_THROWS_AS(birkhoff(doubling_map(), [](double x) { return x; }, 0.3, 0), error);
}

TEST_CASE("normalized sums of the doubling map look normal") {
  StepFunction mu = StepFunction::constant(1.0);
  StepFunction f = StepFunction::centered_identity(256);
  CltReport rep = clt_probe(doubling_map(), mu, f, 1024, 4096);
  CHECK(rep.n == 1024);
  CHECK(rep.samples == 4096);
  CHECK(rep.sums.size() == 4096);
  CHECK_FALSE(rep.degenerate);
  // the asymptotic variance of x - 1/2 under doubling is 1/4
  CHECK(rep.sigma2 > 0.2);
  CHECK(rep.sigma2 < 0.31);
  CHECK(rep.green_kubo > 0.23);
  CHECK(rep.green_kubo < 0.27);
  CHECK(rep.normal_distance <= 0.05);

  CltReport again = clt_probe(doubling_map(), mu, f, 1024, 4096);
  CHECK(again.sigma2 == rep.sigma2);
  CHECK(again.normal_distance == rep.normal_distance);
}

TEST_CASE("clt probe rejects observables with nonzero mean") {
  StepFunction mu = StepFunction::constant(1.0);
  CHECK_THROWS_AS(clt_probe(doubling_map(), mu, StepFunction::constant(1.0), 64, 16), error);
  CHECK_THROWS_AS(clt_probe(doubling_map(), mu, StepFunction::constant(1.0), 0, 16), error);
}

TEST_CASE("a vanishing observable degenerates instead of dividing by zero") {
  StepFunction mu = StepFunction::constant(1.0);
  CltReport rep = clt_probe(doubling_map(), mu, StepFunction::constant(0.0), 32, 64);
  CHECK(rep.degenerate);
  CHECK(rep.sigma2 <= 1e-12);
  CHECK(rep.normal_distance == 0.0);
}

TEST_CASE("normal cdf reference points") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(normal_cdf(-1.0) + normal_cdf(1.0) == doctest::Approx(1.0).epsilon(1e-14));
}
