#include <benchmark/benchmark.h>

#include "acim/builtins.hpp"
#include "acim/ergodics.hpp"
#include "acim/first_return.hpp"
#include "acim/transfer.hpp"
#include "acim/ulam.hpp"

static void BM_FpStepFinite(benchmark::State& state) {
  acim::PiecewiseMap map = acim::doubling_map();
  acim::StepFunction f = acim::StepFunction::centered_identity(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(acim::fp_step(map, f).density.integral());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FpStepFinite)->Arg(64)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

static void BM_FpStepAccumulating(benchmark::State& state) {
  acim::PiecewiseMap map = acim::harmonic_map();
  acim::StepFunction f = acim::StepFunction::centered_identity(static_cast<std::size_t>(state.range(0)));
  acim::fp_step(map, f);  // warm the branch prefix once
  for (auto _ : state) benchmark::DoNotOptimize(acim::fp_step(map, f).density.integral());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FpStepAccumulating)->Arg(64)->Arg(256)->Arg(1024)->Complexity();

static void BM_BuildUlam(benchmark::State& state) {
  acim::PiecewiseMap map = acim::shifted_linear_map();
  const auto bins = static_cast<std::size_t>(state.range(0));
  acim::build_ulam(map, bins);
  for (auto _ : state) benchmark::DoNotOptimize(acim::build_ulam(map, bins).max_defect());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildUlam)->Arg(64)->Arg(256)->Arg(1024)->Complexity();

static void BM_InvariantMasses(benchmark::State& state) {
  acim::UlamMatrix m =
      acim::build_ulam(acim::three_branch_map(), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(acim::invariant_masses(m, 1e-12, 100000).residual);
}
BENCHMARK(BM_InvariantMasses)->Arg(64)->Arg(256)->Arg(1024);

static void BM_SecondEigenvalue(benchmark::State& state) {
  acim::UlamMatrix m =
      acim::build_ulam(acim::three_branch_map(), static_cast<std::size_t>(state.range(0)));
  acim::PowerResult pr = acim::invariant_masses(m, 1e-13, 100000);
  for (auto _ : state)
    benchmark::DoNotOptimize(acim::second_eigenvalue(m, pr.masses, 1e-10, 100000, 1).lambda2_abs);
}
BENCHMARK(BM_SecondEigenvalue)->Arg(64)->Arg(256);

static void BM_OrbitStep(benchmark::State& state) {
  acim::OrbitSampler orbit(acim::builtin("conjugated_exp", 5), 0.3141592653589793, 1);
  for (auto _ : state) benchmark::DoNotOptimize(orbit.next());
}
BENCHMARK(BM_OrbitStep);

static void BM_OrbitStepDeepTail(benchmark::State& state) {
  acim::OrbitSampler orbit(acim::harmonic_map(), 0.3141592653589793, 1);
  for (auto _ : state) benchmark::DoNotOptimize(orbit.next());
}
BENCHMARK(BM_OrbitStepDeepTail);

static void BM_FirstReturn(benchmark::State& state) {
  acim::PiecewiseMap map = acim::doubling_map();
  acim::FirstReturnOptions opt;
  opt.max_return_time = static_cast<std::size_t>(state.range(0));
  opt.tail_tol = 1e-6;
  for (auto _ : state)
    benchmark::DoNotOptimize(acim::first_return_map(map, 0.5, opt).captured_fraction);
}
BENCHMARK(BM_FirstReturn)->Arg(24)->Arg(48);

BENCHMARK_MAIN();
