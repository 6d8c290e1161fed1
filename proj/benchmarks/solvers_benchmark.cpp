#include <string>

#include <benchmark/benchmark.h>

#include "softarm/experiment/config.hpp"
#include "softarm/grasping.hpp"
#include "softarm/static_solver.hpp"

namespace softarm {
namespace {

void BM_StaticReach(benchmark::State& state, const std::string& name) {
  const experiment::ExperimentConfig config = experiment::preset(name);
  const StaticProblem problem(experiment::make_params(config), experiment::make_mask(config),
                              config.target, config.curvature_constraint);
  StaticOptions options;
  options.solver = experiment::make_solver_options(config, InnerMethod::kBfgs);
  for (auto _ : state) {
    StaticSolution sol = solve_static_reachability(problem, options);
    benchmark::DoNotOptimize(sol.control.data());
  }
}
BENCHMARK_CAPTURE(BM_StaticReach, test1, std::string("test1"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_StaticReach, test2, std::string("test2"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_StaticReach, test4, std::string("test4"))->Unit(benchmark::kMillisecond);

void BM_StaticGrasp(benchmark::State& state, const std::string& name) {
  const experiment::ExperimentConfig config = experiment::preset(name);
  const GraspProblem problem(experiment::make_params(config), experiment::make_mask(config),
                             experiment::make_object(config), experiment::make_weight(config),
                             config.curvature_constraint);
  for (auto _ : state) {
    GraspSolution sol = solve_static_grasping(problem);
    benchmark::DoNotOptimize(sol.control.data());
  }
}
BENCHMARK_CAPTURE(BM_StaticGrasp, test5, std::string("test5"))->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_StaticGrasp, test8, std::string("test8"))->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace softarm
