#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "acim/builtins.hpp"
#include "acim/common.hpp"
#include "acim/first_return.hpp"
#include "acim/iterate.hpp"
#include "acim/validate.hpp"

using namespace acim;

TEST_CASE("iterate partition of the doubling map") {
  PiecewiseMap map = doubling_map();
  for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{6}}) {
    IteratePartition part = iterate_partition(map, n);
    CHECK(part.n == n);
    CHECK(part.cells.size() == (std::size_t{1} << n));
    CHECK(part.mesh == std::ldexp(1.0, -static_cast<int>(n)));
    CHECK(part.min_slope == std::ldexp(1.0, static_cast<int>(n)));
    CHECK(part.min_slope_sound);
    CHECK(part.truncation_error <= 1e-12);
    // Cells tile [0,1] in order.
    double prev = 0.0;
    for (const IterateCell& c : part.cells) {
      CHECK(c.left == doctest::Approx(prev).epsilon(1e-12));
      CHECK(c.path.size() == n);
      prev = c.right;
    }
    CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("mesh of the three branch map halves exactly") {
  std::vector<double> meshes = mesh_decay(three_branch_map(), 8);
  REQUIRE(meshes.size() == 8);
  for (std::size_t n = 1; n <= 8; ++n)
    CHECK(meshes[n - 1] == std::ldexp(1.0, -static_cast<int>(n)));
}

TEST_CASE("composition along a recorded path") {
  PiecewiseMap map = doubling_map();
  IteratePartition part = iterate_partition(map, 2);
  // x in [0.25, 0.5): path branch 1 then branch 2, tau^2(x) = 4x - 1.
  for (const IterateCell& c : part.cells) {
    if (c.left == 0.25) {
      REQUIRE(c.path.size() == 2);
      CHECK(c.path[0] == 1);
      CHECK(c.path[1] == 2);
      CHECK(compose_value(map, c.path, 0.3) == doctest::Approx(0.2).epsilon(1e-15));
      CHECK(compose_derivative(map, c.path, 0.3) == 4.0);
      CHECK(c.slope_left == 4.0);
    }
  }
}

TEST_CASE("min slope certificates at order one") {
  for (const char* name : {"three_branch", "doubling", "harmonic"}) {
    INFO(name);
    SlopeCertificate cert = min_slope_certificate(builtin(name), 2.0);
    CHECK(cert.found);
    CHECK(cert.n == 1);
    CHECK(cert.min_slope >= 2.0);
  }
}

TEST_CASE("min slope certificate needs depth on a lazy map") {
  // Slopes 1.25 and 5: order 1 fails the target 2, order 2 reaches 1.25 * 1.25 < 2,
  // so the certificate needs order 3 (worst chain is the slow branch thrice).
  PiecewiseMap map({Branch::affine_vanishing(0.0, 0.8, 1.25), Branch::affine_vanishing(0.8, 1.0, 5.0)},
                   std::nullopt, false);
  SlopeCertificate cert = min_slope_certificate(map, 2.0, 16);
  CHECK(cert.found);
  CHECK(cert.n == 4);  // 1.25^3 = 1.95 < 2 but 1.25^4 = 2.44
  CHECK(cert.min_slope >= 2.0);
}

TEST_CASE("iterate options validate") {
  CHECK_THROWS_AS(iterate_partition(doubling_map(), 0), error);
  IterateOptions tight;
  tight.cell_cap = 8;
  CHECK_THROWS_AS(iterate_partition(doubling_map(), 5, tight), error);
}

TEST_CASE("first return of the doubling map past one half") {
  FirstReturnOptions opt;
  opt.max_return_time = 4;
  opt.tail_tol = 0.125;
  FirstReturnResult res = first_return_map(doubling_map(), 0.5, opt);
  CHECK(res.eps == 0.5);
  CHECK(res.captured_fraction == doctest::Approx(15.0 / 16.0).epsilon(1e-15));
  CHECK(res.unreturned_fraction == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  REQUIRE(res.branches.size() == 4);

  // Exact analytic layout: return time t on [1/2 + 2^-(t+1), 1/2 + 2^-t],
  // composed map 2^t x - 2^(t-1) ... checked against brute force below.
  for (std::size_t t = 1; t <= 4; ++t) {
    const ReturnBranch& rb = res.branches[t - 1];
    CHECK(rb.return_time == t);
    CHECK(rb.affine);
    CHECK(rb.base_a == 0.5 + std::ldexp(1.0, -static_cast<int>(t) - 1));
    CHECK(rb.base_b == 0.5 + std::ldexp(1.0, -static_cast<int>(t)));
    CHECK(rb.slope == std::ldexp(1.0, static_cast<int>(t)));
  }

  // Brute force oracle: iterate the base map and record the first return.
  PiecewiseMap base = doubling_map();
  for (const ReturnBranch& rb : res.branches) {
    for (double frac : {0.1, 0.5, 0.9}) {
      double x = rb.base_a + frac * (rb.base_b - rb.base_a);
      double y = x;
      std::size_t steps = 0;
      do {
        y = base.apply(y).value;
        ++steps;
      } while (y < 0.5 && steps < 64);
      CHECK(steps == rb.return_time);
      CHECK(y == doctest::Approx(rb.slope * x + rb.intercept).epsilon(1e-12));
    }
  }
}

TEST_CASE("first return map is itself admissible") {
  FirstReturnOptions opt;
  opt.max_return_time = 48;
  FirstReturnResult res = first_return_map(doubling_map(), 0.5, opt);
  CHECK(res.captured_fraction >= 1.0 - 1e-8);
  ClassReport rep = validate(res.map);
  CHECK(rep.in_T);
  CHECK(res.map.accumulates_at_zero());  // return times pile up just past eps
}

TEST_CASE("first return rejects bad inputs") {
  CHECK_THROWS_AS(first_return_map(doubling_map(), 0.0), error);
  CHECK_THROWS_AS(first_return_map(doubling_map(), 1.0), error);
  FirstReturnOptions opt;
  opt.max_return_time = 3;
  opt.tail_tol = 1e-8;  // 7/8 captured is not enough
  CHECK_THROWS_AS(first_return_map(doubling_map(), 0.5, opt), error);
}
