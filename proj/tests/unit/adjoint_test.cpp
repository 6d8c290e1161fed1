#include "softarm/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace softarm {
namespace {

SpaceTimeControl smooth_control(const Grid& grid, int steps, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  const double a = coeff(rng), b = coeff(rng), c = coeff(rng);
  SpaceTimeControl u;
  u.values.resize(grid.size(), steps);
  for (int i = 0; i < grid.size(); ++i) {
    for (int k = 0; k < steps; ++k) {
      const double s = grid.s(i);
      const double t = static_cast<double>(k) / steps;
      u.values(i, k) = scale * std::tanh(a + b * std::cos(3.0 * s) + c * std::sin(2.0 * t + s));
    }
  }
  return u;
}

TEST(AdjointTest, GradientMatchesFiniteDifferences) {
  const Grid grid(11);
  const ModelParams params = testing::arm_params(grid);
  const TimeGrid time{1e-3, 40};
  const ActuationMask mask = ActuationMask::from_intervals({{0.35, 0.65}});
  const Vec2 target(0.3, -0.6);
  std::mt19937_64 rng(11);
  const DynamicProblem probe(params, mask, target, time, rest_state(grid));
  const SpaceTimeControl u = project_control(smooth_control(grid, 40, rng, 0.3),
                                             probe.deactivated());
  const DynamicSolution first = evaluate_dynamic(probe, u);
  DynamicsOptions frozen;
  frozen.substeps = 2 * *std::max_element(first.run.substeps.begin(), first.run.substeps.end());
  const DynamicProblem problem(params, mask, target, time, rest_state(grid), frozen);

  const DynamicSolution base = evaluate_dynamic(problem, u);
  const Eigen::MatrixXd grad = control_gradient(base.run, solve_adjoint(base.run, problem), problem);
  for (int i = 0; i < grid.size(); ++i) {
    if (problem.deactivated()[i]) EXPECT_EQ(grad.row(i).cwiseAbs().maxCoeff(), 0.0);
  }
  for (int d = 0; d < 3; ++d) {
    const SpaceTimeControl dir =
        project_control(smooth_control(grid, 40, rng, 1.0), problem.deactivated());
    constexpr double kStep = 1e-5;
    SpaceTimeControl plus = u, minus = u;
    plus.values += kStep * dir.values;
    minus.values -= kStep * dir.values;
    const double fd = (evaluate_dynamic(problem, plus).cost.total() -
                       evaluate_dynamic(problem, minus).cost.total()) /
                      (2.0 * kStep);
    const double adjoint = space_time_dot(grad, dir.values, grid, time.dt);
    EXPECT_NEAR(adjoint, fd, 1e-5 * std::abs(fd)) << "direction " << d;
  }
}

TEST(AdjointTest, TerminalAdjointIsMinusVelocity) {
  const Grid grid(11);
  const TimeGrid time{1e-3, 20};
  const DynamicProblem problem(testing::arm_params(grid), {}, Vec2(0.2, -0.8), time,
                               rest_state(grid));
  const DynamicSolution sol =
      evaluate_dynamic(problem, SpaceTimeControl::constant(ScalarField::Constant(11, 0.5), 20));
  const AdjointRun adj = solve_adjoint(sol.run, problem);
  ASSERT_EQ(adj.qbar.size(), 21u);
  EXPECT_LE((adj.qbar.back() + sol.run.states.back().v).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DynamicCostTest, RectangleRuleOverStoredSeries) {
  CostSeries series;
  series.t = {0.0, 0.5, 1.0};
  series.tip = {1.0, 2.0, 100.0};
  series.control = {0.5, 0.25, 100.0};
  series.kinetic = {9.0, 9.0, 3.0};
  const DynamicCost cost = dynamic_cost(series, 0.5);
  EXPECT_DOUBLE_EQ(cost.tip, 1.5);
  EXPECT_DOUBLE_EQ(cost.control, 0.375);
  EXPECT_DOUBLE_EQ(cost.terminal_kinetic, 3.0);
  EXPECT_DOUBLE_EQ(cost.total(), 4.875);
}

TEST(SpaceTimeTest, DotOfOnesIsFinalTime) {
  const Grid grid(26);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(26, 80);
  EXPECT_NEAR(space_time_dot(ones, ones, grid, 0.025), 2.0, 1e-13);
}

TEST(SpaceTimeTest, ProjectionClipsAndMasks) {
  SpaceTimeControl u;
  u.values.resize(3, 2);
  u.values << 2.0, -0.5, -3.0, 0.7, 0.4, -1.2;
  const SpaceTimeControl p = project_control(u, {false, true, false});
  Eigen::MatrixXd expected(3, 2);
  expected << 1.0, -0.5, 0.0, 0.0, 0.4, -1.0;
  EXPECT_EQ(p.values, expected);
}

TEST(DynamicOptimizerTest, ReducesCostFromZeroControl) {
  const Grid grid(11);
  const TimeGrid time{2e-3, 50};
  const DynamicProblem problem(testing::arm_params(grid), {}, Vec2(0.3, -0.8), time,
                               rest_state(grid));
  DynamicOptimizerOptions options;
  options.max_iterations = 5;
  const SpaceTimeControl zero = SpaceTimeControl::constant(ScalarField::Zero(11), 50);
  const DynamicSolution sol = optimize_dynamic(problem, zero, options);
  ASSERT_FALSE(sol.report.iterations.empty());
  EXPECT_LT(sol.cost.total(), evaluate_dynamic(problem, zero).cost.total());
  EXPECT_LE(sol.control.values.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_GT(sol.report.substeps, 0);
}

}  // namespace
}  // namespace softarm
