#include "softarm/discrete_model.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace softarm {
namespace {

VectorField straight(int links) {
  VectorField q(2, links + 1);
  for (int k = 0; k <= links; ++k) q.col(k) = Vec2(0.0, -static_cast<double>(k) / links);
  return q;
}

TEST(LinkChainTest, GhostJoints) {
  const Grid grid(6);
  const LinkChain chain =
      LinkChain::from_params(testing::arm_params(grid), straight(5), ScalarField::Zero(6));
  EXPECT_EQ(chain.links(), 5);
  EXPECT_DOUBLE_EQ(chain.link_length, 0.2);
  EXPECT_NEAR((chain.joint(-1) - Vec2(0.0, 0.2)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((chain.joint(6) - Vec2(0.0, -1.2)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(chain.mass(2), std::exp(-0.4) * 0.2, 1e-15);
  EXPECT_NEAR(chain.angle_bound(1), 4.0 * std::numbers::pi * 1.04 * 0.2, 1e-14);
}

TEST(DiscretePotentialTest, StraightRestChainIsUnstressed) {
  const Grid grid(11);
  const LinkChain chain =
      LinkChain::from_params(testing::arm_params(grid), straight(10), ScalarField::Zero(11));
  EXPECT_NEAR(potential_F(chain, ScalarField::Ones(10)), 0.0, 1e-15);
  EXPECT_NEAR(potential_G(chain), 0.0, 1e-30);
  EXPECT_NEAR(potential_B(chain), 0.0, 1e-30);
  EXPECT_NEAR(potential_H(chain), 0.0, 1e-30);
}

TEST(DiscretePotentialTest, SingleKinkByHand) {
  const Grid grid(3);
  ModelParams p = testing::arm_params(grid);
  VectorField q(2, 3);
  const double l = 0.5;
  const double a = 0.3;
  q.col(0) = Vec2(0, 0);
  q.col(1) = Vec2(0, -l);
  q.col(2) = q.col(1) + l * Vec2(std::sin(a), -std::cos(a));
  ScalarField u = ScalarField::Zero(3);
  const LinkChain chain = LinkChain::from_params(p, q, u);
  const double cross = l * l * std::sin(a);
  EXPECT_NEAR(potential_B(chain), p.eps(1) * cross * cross, 1e-15);
  EXPECT_NEAR(potential_H(chain), p.mu(1) * std::pow(std::sin(a), 2), 1e-15);
}

TEST(DiscretePotentialTest, StretchedLinkLoadsF) {
  const Grid grid(3);
  VectorField q(2, 3);
  q << 0.0, 0.0, 0.0, 0.0, -0.6, -1.1;
  ScalarField sigma(2);
  sigma << 2.0, 3.0;
  const LinkChain chain =
      LinkChain::from_params(testing::arm_params(grid), q, ScalarField::Zero(3));
  EXPECT_NEAR(potential_F(chain, sigma), 2.0 * (0.36 - 0.25) + 3.0 * (0.25 - 0.25), 1e-15);
}

TEST(DiscreteLagrangianTest, KineticEnergyOnStraightChain) {
  const int links = 8;
  const Grid grid(links + 1);
  const ModelParams p = testing::arm_params(grid);
  const LinkChain chain = LinkChain::from_params(p, straight(links), ScalarField::Zero(links + 1));
  VectorField v = VectorField::Ones(2, links + 1);
  double kinetic = 0.0;
  for (int k = 0; k <= links; ++k) kinetic += p.rho(k) / links;
  EXPECT_NEAR(discrete_lagrangian(chain, v, ScalarField::Zero(links)), kinetic, 1e-14);
}

TEST(ContinuumLagrangianTest, UniformMotionOfStraightRod) {
  const Grid grid(41);
  const ModelParams p = testing::arm_params(grid);
  VectorField q(2, grid.size());
  for (int i = 0; i < grid.size(); ++i) q.col(i) = Vec2(0.0, -grid.s(i));
  VectorField v(2, grid.size());
  v.row(0).setConstant(1.0);
  v.row(1).setZero();
  ScalarField rho_half = 0.5 * p.rho;
  EXPECT_NEAR(continuum_lagrangian(q, v, ScalarField::Ones(41), ScalarField::Zero(41), p),
              grid.integrate(rho_half), 1e-12);
}

}  // namespace
}  // namespace softarm
