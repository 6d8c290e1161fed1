#include <benchmark/benchmark.h>

#include "softarm/adjoint.hpp"
#include "softarm/dynamics.hpp"
#include "softarm/experiment/config.hpp"

namespace softarm {
namespace {

constexpr int kSteps = 100;

DynamicProblem make_problem(int substeps) {
  const experiment::ExperimentConfig config = experiment::preset("test2-dynamic");
  const ModelParams params = experiment::make_params(config);
  DynamicsOptions options;
  options.substeps = substeps;
  return DynamicProblem(params, experiment::make_mask(config), config.target,
                        TimeGrid{config.dynamic.dt, kSteps}, rest_state(params.grid), options);
}

SpaceTimeControl bend(const DynamicProblem& problem) {
  return project_control(
      SpaceTimeControl::constant(ScalarField::Constant(problem.params().grid.size(), 0.3), kSteps),
      problem.deactivated());
}

void BM_VerletSubstep(benchmark::State& state) {
  const DynamicProblem problem = make_problem(0);
  const RodModel& model = problem.model();
  const RodState start = rest_state(model.grid());
  const ScalarField u = bend(problem).at(0);
  for (auto _ : state) {
    RodState next = verlet_substep(model, start.q, start.v, u, 1e-5);
    benchmark::DoNotOptimize(next.q.data());
  }
}
BENCHMARK(BM_VerletSubstep);

void BM_Forward(benchmark::State& state) {
  const DynamicProblem problem = make_problem(0);
  const SpaceTimeControl u = bend(problem);
  for (auto _ : state) {
    DynamicSolution sol = evaluate_dynamic(problem, u);
    benchmark::DoNotOptimize(sol.cost.tip);
  }
  state.SetItemsProcessed(state.iterations() * kSteps);
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMillisecond);

void BM_Adjoint(benchmark::State& state) {
  const DynamicProblem probe = make_problem(0);
  const SpaceTimeControl u = bend(probe);
  const int substeps = evaluate_dynamic(probe, u).run.substeps.front();
  const DynamicProblem problem = make_problem(substeps);
  const DynamicSolution base = evaluate_dynamic(problem, u);
  for (auto _ : state) {
    AdjointRun adj = solve_adjoint(base.run, problem);
    benchmark::DoNotOptimize(adj.control_sensitivity.data());
  }
  state.SetItemsProcessed(state.iterations() * kSteps);
}
BENCHMARK(BM_Adjoint)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace softarm
