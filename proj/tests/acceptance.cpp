// Acceptance gate for the toolkit: eleven end-to-end checks, one verdict line
// each, nonzero exit when any of them fails or overruns its time budget.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "acim/builtins.hpp"
#include "acim/ergodics.hpp"
#include "acim/first_return.hpp"
#include "acim/io.hpp"
#include "acim/iterate.hpp"
#include "acim/sampler.hpp"
#include "acim/transfer.hpp"
#include "acim/ulam.hpp"
#include "test_support.hpp"

using namespace acim;

namespace {

struct Gate {
  int index = 0;
  int failures = 0;

  void run(const char* name, double budget_s, const std::function<bool(std::string&)>& body) {
    ++index;
    std::string detail;
    bool ok = false;
    auto t0 = std::chrono::steady_clock::now();
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_budget = dt <= budget_s;
    std::printf("ACCEPTANCE %2d %s: %s (%.2f s)\n", index, name,
                ok && in_budget ? "PASS" : "FAIL", dt);
    if (!ok && !detail.empty()) std::printf("              %s\n", detail.c_str());
    if (ok && !in_budget) std::printf("              over the %.0f s budget\n", budget_s);
    if (!(ok && in_budget)) ++failures;
    std::fflush(stdout);
  }
};

bool expect(bool cond, std::string& detail, const std::string& msg) {
  if (!cond && detail.empty()) detail = msg;
  return cond;
}

std::string num(double x) { return g17(x); }

}  // namespace

int main() {
  Gate gate;

  gate.run("exact pushforward and bin matrix", 1.0, [](std::string& detail) {
    bool ok = true;
    StepFunction half = StepFunction::indicator(0.0, 0.5, 2.0);
    Pushforward pf = fp_step(three_branch_map(), half);
    ok &= expect(l1_distance(pf.density, half) == 0.0, detail, "pushforward is not exact");
    ok &= expect(pf.tail_bound == 0.0, detail, "finite map reported a tail bound");

    UlamMatrix m4 = build_ulam(three_branch_map(), 4);
    PowerResult pr4 = invariant_masses(m4, 1e-15, 200000);
    StepFunction d4 = masses_to_density(pr4.masses);
    const double want[4] = {2.0, 2.0, 0.0, 0.0};
    for (int j = 0; j < 4; ++j) {
      double got = d4.values()[static_cast<std::size_t>(j)];
      ok &= expect(std::abs(got - want[j]) <= 1e-12, detail,
                   "bin " + std::to_string(j) + " density " + num(got));
    }

    UlamMatrix m = build_ulam(three_branch_map(), 1024);
    StepFunction d = masses_to_density(invariant_masses(m, 1e-13, 200000).masses);
    double err = l1_distance(d, half);
    ok &= expect(err <= 1e-10, detail, "L1 error at 1024 bins is " + num(err));
    return ok;
  });

  gate.run("uniform density of accumulating families", 5.0, [](std::string& detail) {
    bool ok = true;
    for (const char* name : {"shifted_linear", "harmonic"}) {
      PiecewiseMap map = builtin(name);
      StepFunction one = StepFunction::constant(1.0);
      for (int j = 0; j <= 100; ++j) {
        double x = (static_cast<double>(j) + 0.5) / 101.0;
        PointValue v = fp_pointwise(map, one, x, 1e-9);
        ok &= expect(std::abs(v.value - 1.0) <= 1e-8, detail,
                     std::string(name) + " pointwise value " + num(v.value) + " at x=" + num(x));
      }
      UlamMatrix m = build_ulam(map, 256);
      StepFunction d = masses_to_density(invariant_masses(m, 1e-12, 200000).masses);
      double err = l1_distance(d, one);
      ok &= expect(err <= 1e-4, detail, std::string(name) + " L1 distance " + num(err));
    }
    return ok;
  });

  gate.run("sup-norm inequality constants", 10.0, [](std::string& detail) {
    bool ok = true;
    LyConstants cs = ly_constants(shifted_linear_map());
    ok &= expect(std::abs(cs.alpha - 0.5) <= 1e-10 && std::abs(cs.D - 0.75) <= 1e-10 &&
                     std::abs(cs.K - 2.5) <= 1e-10,
                 detail, "shifted_linear constants " + num(cs.alpha) + ", " + num(cs.D) + ", " +
                             num(cs.K));
    LyConstants cd = ly_constants(doubling_map());
    ok &= expect(std::abs(cd.alpha - 0.5) <= 1e-10 && std::abs(cd.D - 1.0) <= 1e-10 &&
                     std::abs(cd.K - 3.0) <= 1e-10,
                 detail,
                 "doubling constants " + num(cd.alpha) + ", " + num(cd.D) + ", " + num(cd.K));

    const char* names[] = {"three_branch", "doubling", "shifted_linear", "harmonic",
                           "conjugated_exp"};
    for (const char* name : names) {
      PiecewiseMap map = builtin(name, 5);
      LyConstants c = ly_constants(map);
      Rng rng(301);
      int violations = 0;
      for (int t = 0; t < 200; ++t) {
        StepFunction f = testing::random_nonincreasing_density(rng);
        SupBoundCheck sb = sup_bound_check(map, f, c);
        if (!sb.pass) ++violations;
      }
      ok &= expect(violations == 0, detail,
                   std::string(name) + " has " + std::to_string(violations) + " violations");
    }
    return ok;
  });

  gate.run("monotonicity preservation", 10.0, [](std::string& detail) {
    bool ok = true;
    const char* names[] = {"three_branch", "doubling", "shifted_linear", "harmonic",
                           "conjugated_exp"};
    for (const char* name : names) {
      PiecewiseMap map = builtin(name, 5);
      bool affine = std::string(name) != "conjugated_exp";
      Rng rng(401);
      for (int t = 0; t < 200; ++t) {
        StepFunction f = testing::random_nonincreasing_density(rng);
        MonotoneCheck mc = monotone_check(map, f);
        ok &= expect(mc.pass, detail,
                     std::string(name) + " output increases between " + num(mc.at_left) +
                         " and " + num(mc.at_right));
        if (!mc.pass) return false;
        // a non-increasing density is bounded by its mass over the left tail
        if (affine) {
          Pushforward pf = fp_step(map, f);
          double mass = pf.density.integral();
          for (int s = 0; s < 100; ++s) {
            double x = rng.uniform(1e-6, 1.0);
            double v = pf.density.value_at(x);
            ok &= expect(v <= mass / x + 1e-9 + pf.tail_bound, detail,
                         std::string(name) + " value " + num(v) + " above " + num(mass / x) +
                             " at x=" + num(x));
          }
        } else {
          for (int s = 0; s < 100; ++s) {
            double x = rng.uniform(1e-6, 1.0);
            PointValue v = fp_pointwise(map, f, x);
            ok &= expect(v.value <= f.integral() / x + 1e-9, detail,
                         std::string(name) + " value " + num(v.value) + " above " +
                             num(f.integral() / x) + " at x=" + num(x));
          }
        }
        if (!ok) return false;
      }
    }
    return ok;
  });

  gate.run("expansion certificates and mesh decay", 5.0, [](std::string& detail) {
    bool ok = true;
    for (const char* name : {"three_branch", "doubling", "harmonic"}) {
      SlopeCertificate c = min_slope_certificate(builtin(name), 2.0);
      ok &= expect(c.found && c.n == 1 && c.min_slope >= 2.0, detail,
                   std::string(name) + " certificate at n=" + std::to_string(c.n));
    }
    std::vector<double> meshes = mesh_decay(three_branch_map(), 8);
    ok &= expect(meshes.size() == 8, detail, "mesh sequence length");
    for (std::size_t n = 1; n <= meshes.size(); ++n)
      ok &= expect(meshes[n - 1] == std::ldexp(1.0, -static_cast<int>(n)), detail,
                   "mesh at order " + std::to_string(n) + " is " + num(meshes[n - 1]));
    return ok;
  });

  gate.run("second eigenvalue and gap probe", 30.0, [](std::string& detail) {
    bool ok = true;
    UlamMatrix m4 = build_ulam(three_branch_map(), 4);
    PowerResult pr4 = invariant_masses(m4, 1e-14, 100000);
    EigenEstimate e4 = second_eigenvalue(m4, pr4.masses, 1e-10, 100000, 1);
    ok &= expect(e4.converged && std::abs(e4.lambda2_abs - 0.5) <= 1e-6, detail,
                 "four-bin second eigenvalue " + num(e4.lambda2_abs));

    const char* names[] = {"three_branch", "doubling", "shifted_linear", "harmonic",
                           "conjugated_exp"};
    for (const char* name : names) {
      UlamMatrix m = build_ulam(builtin(name, 5), 64);
      PowerResult pr = invariant_masses(m, 1e-13, 100000);
      EigenEstimate ee = second_eigenvalue(m, pr.masses, 1e-10, 100000, 1);
      GapProbe gp = spectral_gap_probe(m, 16);
      double diff = std::abs(gp.q_fit - ee.lambda2_abs);
      ok &= expect(diff <= 0.05, detail, std::string(name) + " q=" + num(gp.q_fit) +
                                             " lambda2=" + num(ee.lambda2_abs));
    }
    return ok;
  });

  gate.run("correlation decay", 30.0, [](std::string& detail) {
    StepFunction mu = StepFunction::constant(1.0);
    StepFunction f = StepFunction::centered_identity(256);
    CorrelationReport rep =
        correlations(doubling_map(), mu, f, f, 12, CorrMethod::exact_matrix);
    bool ok = expect(std::abs(rep.values[1] - 1.0 / 24.0) <= 1e-3, detail,
                     "lag-1 correlation " + num(rep.values[1]));
    ok &= expect(!rep.fit_degenerate && rep.q_fit >= 0.45 && rep.q_fit <= 0.55, detail,
                 "fitted rate " + num(rep.q_fit));
    return ok;
  });

  gate.run("central limit behavior", 60.0, [](std::string& detail) {
    StepFunction mu = StepFunction::constant(1.0);
    StepFunction f = StepFunction::centered_identity(256);
    CltReport rep = clt_probe(doubling_map(), mu, f, 10000, 10000);
    bool ok = expect(!rep.degenerate, detail, "degenerate variance");
    ok &= expect(std::abs(rep.sigma2 - 0.25) <= 0.02, detail, "sigma2 " + num(rep.sigma2));
    ok &= expect(std::abs(rep.green_kubo - 0.25) <= 0.02, detail,
                 "series sum " + num(rep.green_kubo));
    ok &= expect(rep.normal_distance <= 0.02, detail,
                 "distance to normal " + num(rep.normal_distance));
    return ok;
  });

  gate.run("uniform lower bound", 30.0, [](std::string& detail) {
    bool ok = true;
    for (const char* name : {"three_branch", "doubling", "shifted_linear", "harmonic"}) {
      PiecewiseMap map = builtin(name);
      StepFunction h = lower_function(ly_constants(map));
      Rng rng(901);
      for (int t = 0; t < 20 && ok; ++t) {
        StepFunction f = testing::random_nonincreasing_density(rng);
        DominationScan ds = find_domination_order(map, f, h, 50);
        ok &= expect(ds.found && ds.n1 <= 50, detail,
                     std::string(name) + " failed to dominate within 50 steps");
      }
    }
    return ok;
  });

  gate.run("conjugated sampler", 60.0, [](std::string& detail) {
    bool ok = true;
    TargetDistribution target = TargetDistribution::exponential();
    for (std::size_t k : {std::size_t{2}, std::size_t{5}}) {
      double res = pf_fixed_point_check(target, k);
      ok &= expect(res <= 1e-8, detail,
                   "fixed-point residual " + num(res) + " at k=" + std::to_string(k));
      std::vector<double> s = sample(builtin("conjugated_exp", k), 0.3141592653589793, 1000000);
      double ks = ks_distance(s, target.cdf);
      ok &= expect(ks <= 0.01, detail, "KS distance " + num(ks) + " at k=" + std::to_string(k));
    }
    return ok;
  });

  gate.run("first-return structure", 5.0, [](std::string& detail) {
    FirstReturnOptions opt;
    opt.max_return_time = 4;
    opt.tail_tol = 0.125;
    FirstReturnResult fr = first_return_map(doubling_map(), 0.5, opt);
    bool ok = expect(fr.captured_fraction == 15.0 / 16.0, detail,
                     "captured fraction " + num(fr.captured_fraction));
    ok &= expect(fr.captured_fraction >= 1.0 - std::ldexp(1.0, -4), detail, "capture too small");
    ok &= expect(fr.branches.size() == 4, detail,
                 std::to_string(fr.branches.size()) + " branches");
    if (fr.branches.size() == 4) {
      for (std::size_t t = 1; t <= 4; ++t) {
        const ReturnBranch& br = fr.branches[t - 1];
        double a = 0.5 + std::ldexp(1.0, -static_cast<int>(t) - 1);
        double b = 0.5 + std::ldexp(1.0, -static_cast<int>(t));
        ok &= expect(br.return_time == t && br.affine && br.base_a == a && br.base_b == b &&
                         br.slope == std::ldexp(1.0, static_cast<int>(t)) &&
                         br.intercept == -std::ldexp(1.0, static_cast<int>(t) - 1),
                     detail, "branch for return time " + std::to_string(t) + " is off");
      }
    }
    // brute-force oracle: iterate the base map and compare step counts/values
    PiecewiseMap base = doubling_map();
    for (int g = 0; g <= 2000; ++g) {
      double x = 0.5 + 0.5 * static_cast<double>(g) / 2000.0;
      double y = x;
      std::size_t steps = 0;
      do {
        y = base.apply(std::min(y, 1.0)).value;
        ++steps;
      } while (y < 0.5 && steps < 4);
      const ReturnBranch* owner = nullptr;
      for (const ReturnBranch& br : fr.branches)
        if (x >= br.base_a && (x < br.base_b || (br.base_b == 1.0 && x <= 1.0))) owner = &br;
      if (y >= 0.5) {  // returned within four steps
        ok &= expect(owner != nullptr, detail, "no branch covers x=" + num(x));
        if (owner) {
          ok &= expect(owner->return_time == steps, detail, "return time mismatch at " + num(x));
          ok &= expect(std::abs(owner->slope * x + owner->intercept - y) <= 1e-12, detail,
                       "return value mismatch at x=" + num(x));
        }
      } else {
        ok &= expect(owner == nullptr, detail, "branch covers unreturned x=" + num(x));
      }
      if (!ok) break;
    }
    return ok;
  });

  std::printf("ACCEPTANCE SUMMARY: %d/%d passed\n", gate.index - gate.failures, gate.index);
  return gate.failures == 0 ? 0 : 1;
}
