#include "softarm/params.hpp"

#include <gtest/gtest.h>

#include "softarm/errors.hpp"
#include "test_support.hpp"

namespace softarm {
namespace {

TEST(ActuationMaskTest, IntervalsMarkClosedRanges) {
  const Grid grid = Grid::from_spacing(0.02);
  const auto off = ActuationMask::from_intervals({{0.35, 0.65}}).nodes(grid);
  for (int i = 0; i < grid.size(); ++i) {
    const double s = grid.s(i);
    EXPECT_EQ(off[i], s >= 0.35 - 1e-12 && s <= 0.65 + 1e-12) << "node " << i;
  }
}

TEST(ActuationMaskTest, AllExceptKeepsSnappedPoints) {
  const Grid grid = Grid::from_spacing(0.02);
  const auto off = ActuationMask::all_except({0.0, 0.25, 0.5, 0.75}).nodes(grid);
  int active = 0;
  for (int i = 0; i < grid.size(); ++i) active += off[i] ? 0 : 1;
  EXPECT_EQ(active, 4);
  EXPECT_FALSE(off[0]);
  EXPECT_FALSE(off[13]);
  EXPECT_FALSE(off[25]);
  EXPECT_FALSE(off[38]);
}

TEST(ActuationMaskTest, EmptyMaskDeactivatesNothing) {
  const Grid grid(11);
  const ActuationMask mask;
  EXPECT_TRUE(mask.empty());
  for (bool b : mask.nodes(grid)) EXPECT_FALSE(b);
}

TEST(ModelParamsTest, OmegaBarFormula) {
  const Grid grid(21);
  const ModelParams p = testing::arm_params(grid);
  const ScalarField ob = p.omega_bar();
  for (int i = 0; i < grid.size(); ++i) {
    EXPECT_NEAR(ob(i), p.mu(i) * p.omega(i) / (p.mu(i) + p.eps(i)), 1e-14);
  }
  EXPECT_EQ(ob(20), 0.0);
}

TEST(ModelParamsTest, DeactivateZeroesMuOnMask) {
  const Grid grid = Grid::from_spacing(0.02);
  const ModelParams p = testing::arm_params(grid);
  const ActuationMask mask = ActuationMask::from_intervals({{0.35, 0.65}});
  const ModelParams q = deactivate(p, mask);
  const auto off = mask.nodes(grid);
  for (int i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(q.mu(i), off[i] ? 0.0 : p.mu(i));
    EXPECT_EQ(q.eps(i), p.eps(i));
  }
}

TEST(ModelParamsTest, ValidateRejectsSignViolations) {
  const Grid grid(11);
  ModelParams p = testing::arm_params(grid);
  EXPECT_NO_THROW(p.validate());
  p.rho(3) = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = testing::arm_params(grid);
  p.nu(2) = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = testing::arm_params(grid);
  p.tau = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(ControlTest, AdmissibleControlClipsAndMasks) {
  ScalarField u(4);
  u << 2.0, -3.0, 0.5, 0.7;
  const ScalarField v = admissible_control(u, {false, false, false, true});
  EXPECT_EQ(v(0), 1.0);
  EXPECT_EQ(v(1), -1.0);
  EXPECT_EQ(v(2), 0.5);
  EXPECT_EQ(v(3), 0.0);
}

TEST(ControlTest, ConstantSpaceTimeControl) {
  ScalarField u(3);
  u << 0.1, 0.2, 0.3;
  const SpaceTimeControl c = SpaceTimeControl::constant(u, 5);
  EXPECT_EQ(c.n_steps(), 5);
  EXPECT_EQ(c.n_nodes(), 3);
  EXPECT_EQ(c.at(4), u);
}

}  // namespace
}  // namespace softarm
