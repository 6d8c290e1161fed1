#include "softarm/grid.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "softarm/errors.hpp"

namespace softarm {
namespace {

TEST(GridTest, SpacingAndEndpoints) {
  const Grid grid = Grid::from_spacing(0.02);
  EXPECT_EQ(grid.size(), 51);
  EXPECT_DOUBLE_EQ(grid.ds(), 0.02);
  EXPECT_EQ(grid.s(0), 0.0);
  EXPECT_EQ(grid.s(50), 1.0);
  EXPECT_EQ(grid.weight(0), 0.5);
  EXPECT_EQ(grid.weight(25), 1.0);
  EXPECT_EQ(grid.weight(50), 0.5);
}

TEST(GridTest, RejectsNonIntegerSpacing) {
  EXPECT_THROW(Grid::from_spacing(0.03), Error);
  EXPECT_THROW(Grid(1), Error);
}

TEST(GridTest, TrapezoidOfQuadraticHasKnownError) {
  const Grid grid(11);
  ScalarField f = grid.coordinates().cwiseAbs2();
  const double h = grid.ds();
  EXPECT_NEAR(grid.integrate(f), 1.0 / 3.0 + h * h / 6.0, 1e-15);
}

TEST(GridTest, NearestNodeRoundsAwayFromAnchor) {
  const Grid grid = Grid::from_spacing(0.02);
  EXPECT_EQ(grid.nearest_node(0.55), 28);
  EXPECT_EQ(grid.nearest_node(0.25), 13);
  EXPECT_EQ(grid.nearest_node(0.0), 0);
  EXPECT_EQ(grid.nearest_node(1.0), 50);
  EXPECT_EQ(grid.nearest_node(0.539), 27);
}

TEST(FdWeightsTest, CentralStencils) {
  const std::vector<double> offsets = {-1.0, 0.0, 1.0};
  const auto w1 = fd_weights(1, offsets);
  const auto w2 = fd_weights(2, offsets);
  EXPECT_NEAR(w1[0], -0.5, 1e-15);
  EXPECT_NEAR(w1[1], 0.0, 1e-15);
  EXPECT_NEAR(w1[2], 0.5, 1e-15);
  EXPECT_NEAR(w2[0], 1.0, 1e-15);
  EXPECT_NEAR(w2[1], -2.0, 1e-15);
  EXPECT_NEAR(w2[2], 1.0, 1e-15);
}

TEST(FdWeightsTest, OneSidedSecondDerivative) {
  const std::vector<double> offsets = {0.0, 1.0, 2.0, 3.0};
  const auto w = fd_weights(2, offsets);
  EXPECT_NEAR(w[0], 2.0, 1e-14);
  EXPECT_NEAR(w[1], -5.0, 1e-14);
  EXPECT_NEAR(w[2], 4.0, 1e-14);
  EXPECT_NEAR(w[3], -1.0, 1e-14);
}

TEST(DerivativeTest, ExactOnQuadratics) {
  const Grid grid(21);
  ScalarField f(grid.size());
  for (int i = 0; i < grid.size(); ++i) f(i) = 3.0 * grid.s(i) * grid.s(i) - grid.s(i) + 2.0;
  const ScalarField df = d1(f, grid);
  const ScalarField ddf = d2(f, grid);
  for (int i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(df(i), 6.0 * grid.s(i) - 1.0, 1e-11);
    EXPECT_NEAR(ddf(i), 6.0, 1e-9);
  }
}

double max_error(int n, int order) {
  const Grid grid(n);
  ScalarField f(n);
  for (int i = 0; i < n; ++i) f(i) = std::sin(2.0 * grid.s(i));
  ScalarField d;
  double scale = 0.0;
  switch (order) {
    case 1: d = d1(f, grid); scale = 2.0; break;
    case 2: d = d2(f, grid); scale = -4.0; break;
    case 3: d = d3(f, grid); scale = -8.0; break;
    default: d = d4(f, grid); scale = 16.0; break;
  }
  double err = 0.0;
  for (int i = 0; i < n; ++i) {
    const double exact = order % 2 ? scale * std::cos(2.0 * grid.s(i)) : scale * std::sin(2.0 * grid.s(i));
    err = std::max(err, std::abs(d(i) - exact));
  }
  return err;
}

TEST(DerivativeTest, SecondOrderConvergence) {
  for (int order = 1; order <= 4; ++order) {
    const double coarse = max_error(41, order);
    const double fine = max_error(81, order);
    EXPECT_GT(std::log2(coarse / fine), 1.8) << "derivative order " << order;
  }
}

TEST(DerivativeTest, TooFewNodesThrow) {
  const Grid grid(5);
  const ScalarField f = ScalarField::Zero(5);
  EXPECT_THROW(d4(f, grid), SizingError);
  EXPECT_NO_THROW(d3(f, grid));
}

}  // namespace
}  // namespace softarm
