#include "softarm/static_solver.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "softarm/errors.hpp"

#include "test_support.hpp"

namespace softarm {
namespace {

StaticProblem reach(const Vec2& target, ActuationMask mask = {}) {
  return StaticProblem(testing::arm_params(Grid(51)), std::move(mask), target);
}

TEST(IntegrateShapeTest, ZeroControlIsStraight) {
  const StaticProblem problem = reach(Vec2(0.0, -1.0));
  const VectorField q = integrate_shape(ScalarField::Zero(51), problem);
  EXPECT_NEAR((q - rest_shape(problem.grid())).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(IntegrateShapeTest, LinksHaveExactLength) {
  const StaticProblem problem = reach(Vec2(0.0, -1.0));
  ScalarField u(51);
  for (int i = 0; i < 51; ++i) u(i) = std::sin(7.0 * problem.grid().s(i));
  const VectorField q = integrate_shape(u, problem);
  EXPECT_EQ(q.col(0), Vec2::Zero());
  for (int i = 0; i + 1 < 51; ++i) {
    EXPECT_NEAR((q.col(i + 1) - q.col(i)).norm(), 0.02, 1e-15);
  }
}

TEST(IntegrateShapeTest, PositiveControlTurnsCounterclockwise) {
  const StaticProblem problem = reach(Vec2(0.0, -1.0));
  const VectorField q = integrate_shape(ScalarField::Constant(51, 0.1), problem);
  EXPECT_GT(q(0, 50), 0.0);
  const Vec2 first = q.col(1) - q.col(0);
  const Vec2 last = q.col(50) - q.col(49);
  EXPECT_GT(first.x() * last.y() - first.y() * last.x(), 0.0);
}

TEST(StaticCostTest, MatchesHandComputation) {
  const StaticProblem problem = reach(Vec2(0.3, -0.5));
  const StaticCost zero = static_cost(ScalarField::Zero(51), problem);
  EXPECT_DOUBLE_EQ(zero.control, 0.0);
  EXPECT_NEAR(zero.target, (0.09 + 0.25) / 2e-4, 1e-8);

  const StaticCost ones = static_cost(ScalarField::Ones(51), problem);
  EXPECT_NEAR(ones.control, 0.5, 1e-14);
}

TEST(StaticCostTest, DeactivatedNodesCarryNoControlCost) {
  const StaticProblem problem =
      reach(Vec2(0.3, -0.5), ActuationMask::from_intervals({{0.0, 0.5}}));
  const StaticCost c = static_cost(ScalarField::Ones(51), problem);
  // Trapezoid weights on s in (0.5, 1]: node 0.5 excluded.
  EXPECT_NEAR(c.control, 0.5 * (0.5 - 0.02 + 0.01), 1e-14);
}

TEST(StaticSolverTest, StraightTargetNeedsNoControl) {
  const StaticSolution sol = solve_static_reachability(reach(Vec2(0.0, -1.0)));
  ASSERT_TRUE(sol.report.converged) << sol.report.termination;
  EXPECT_LE(sol.control.cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE(sol.report.cost, 1e-10);
}

TEST(StaticSolverTest, DeactivatedIntervalStaysStraight) {
  const StaticProblem problem =
      reach(Vec2(0.3563, -0.4423), ActuationMask::from_intervals({{0.35, 0.65}}));
  const StaticSolution sol = solve_static_reachability(problem);
  ASSERT_TRUE(sol.report.converged) << sol.report.termination;
  const Grid& grid = problem.grid();
  for (int i = 0; i < grid.size(); ++i) {
    if (!problem.deactivated()[i]) continue;
    EXPECT_DOUBLE_EQ(sol.control(i), 0.0) << "node " << i;
    EXPECT_NEAR(sol.kappa(i), 0.0, 1e-6) << "node " << i;
  }
  for (int i = 0; i + 1 < grid.size(); ++i) {
    EXPECT_NEAR((sol.curve.col(i + 1) - sol.curve.col(i)).norm(), grid.ds(), 1e-7);
  }
  EXPECT_LE(sol.control.cwiseAbs().maxCoeff(), 1.0 + 1e-12);
}

TEST(StaticSolverTest, RecoveredControlReproducesTheCurve) {
  const StaticProblem problem = reach(Vec2(0.3563, -0.4423));
  const StaticSolution sol = solve_static_reachability(problem);
  ASSERT_TRUE(sol.report.converged);
  const VectorField q = integrate_shape(sol.control, problem);
  EXPECT_LE((q - sol.curve).colwise().norm().maxCoeff(), 2e-2);
  const StaticCost c = static_cost(sol.control, problem);
  EXPECT_NEAR(c.control, sol.report.control_energy, 1e-2 * (1.0 + c.control));
}

TEST(StaticSolverTest, InitialCurveMustMatchGrid) {
  EXPECT_THROW(solve_static_reachability(reach(Vec2(0.0, -1.0)), {}, VectorField::Zero(2, 7)),
               SizingError);
}

}  // namespace
}  // namespace softarm
