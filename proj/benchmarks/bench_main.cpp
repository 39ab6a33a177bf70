#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <string>

#include "ccopf/case_io.hpp"
#include "ccopf/dc_polytope.hpp"
#include "ccopf/redundancy.hpp"
#include "ccopf/reliability.hpp"
#include "ccopf/rng.hpp"
#include "ccopf/scenario_opt.hpp"

using namespace ccopf;

namespace {

const std::string kData = CCOPF_DATA_DIR;

GridCase& case14() {
  static GridCase gc = load_case(kData + "/case14.m");
  return gc;
}

UncertaintyModel model5() {
  UncertaintyModel m;
  m.sigma_step.resize(5);
  double prev_sq = 0.0;
  for (int t = 1; t <= 5; ++t) {
    const double cum = 5.0 * t;
    m.sigma_step(t - 1) = std::sqrt(cum * cum - prev_sq);
    prev_sq = cum * cum;
  }
  return m;
}

void BM_BuildPolytope14(benchmark::State& state) {
  const GridCase& gc = case14();
  for (auto _ : state) benchmark::DoNotOptimize(build_feasibility_polytope(gc));
}
BENCHMARK(BM_BuildPolytope14);

void BM_DeterministicDcopf14(benchmark::State& state) {
  const GridCase& gc = case14();
  for (auto _ : state) benchmark::DoNotOptimize(solve_deterministic_dcopf(gc));
}
BENCHMARK(BM_DeterministicDcopf14);

void BM_McScenarios(benchmark::State& state) {
  UncertaintyModel m = model5();
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_mc_scenarios(m, static_cast<int>(state.range(0)), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McScenarios)->Arg(100)->Arg(453);

void BM_IsScenarios(benchmark::State& state) {
  const GridCase& gc = case14();
  auto [poly, cost] = build_feasibility_polytope(gc);
  UncertaintyModel m = model5();
  AgcPolicy policy = ramp_proportional_policy(gc);
  MixtureSampler mix =
      build_mixture(build_redundancy_system(poly, policy, m, ramp_vector(gc), 0.01));
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_is_scenarios(mix, static_cast<int>(state.range(0)), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IsScenarios)->Arg(100)->Arg(453);

void BM_FoldedScenarioSolve(benchmark::State& state) {
  const GridCase& gc = case14();
  auto [poly, cost] = build_feasibility_polytope(gc);
  UncertaintyModel m = model5();
  AgcPolicy policy = ramp_proportional_policy(gc);
  ScenarioSet set = sample_mc_scenarios(m, static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    LpProblem lp = build_scenario_lp_folded(poly, cost, set, policy, ramp_vector(gc));
    benchmark::DoNotOptimize(solve_lp(lp));
  }
}
BENCHMARK(BM_FoldedScenarioSolve)->Arg(93)->Arg(453);

void BM_FeasibilityProbability(benchmark::State& state) {
  const GridCase& gc = case14();
  auto [poly, cost] = build_feasibility_polytope(gc);
  UncertaintyModel m = model5();
  AgcPolicy policy = ramp_proportional_policy(gc);
  DcopfResult det = solve_deterministic_dcopf(gc);
  SolutionPoint sol{det.solution.x, policy.alpha};
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_feasibility_probability(
        sol, poly, m, ramp_vector(gc), static_cast<int>(state.range(0)), 5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FeasibilityProbability)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
