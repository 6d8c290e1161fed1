#include "softarm/grasping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "softarm/errors.hpp"
#include "test_support.hpp"

namespace softarm {
namespace {

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

// Signed distance to a counterclockwise convex polygon from edge distances and a
// half-plane inside test.
double polygon_oracle(const Vec2& p, const std::vector<Vec2>& v) {
  double dist = std::numeric_limits<double>::infinity();
  bool inside = true;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Vec2& a = v[k];
    const Vec2& b = v[(k + 1) % v.size()];
    dist = std::min(dist, segment_distance(p, a, b));
    const Vec2 e = b - a;
    const Vec2 r = p - a;
    if (e.x() * r.y() - e.y() * r.x() < 0.0) inside = false;
  }
  return inside ? -dist : dist;
}

std::vector<Vec2> square_corners(const Vec2& c, double h) {
  return {c + Vec2(-h, -h), c + Vec2(h, -h), c + Vec2(h, h), c + Vec2(-h, h)};
}

const std::vector<Vec2> kPentagon = {{0.0, -0.2}, {0.3, -0.1}, {0.35, 0.2}, {0.1, 0.35}, {-0.15, 0.1}};

void check_against_oracle(const GraspTarget& target, const std::vector<Vec2>& corners) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> coord(-0.6, 0.6);
  for (int n = 0; n < 100; ++n) {
    const Vec2 p(coord(rng), coord(rng));
    const SignedDistance d = target.distance(p);
    EXPECT_NEAR(d.value, polygon_oracle(p, corners), 1e-12);
    constexpr double h = 1e-6;
    const Vec2 fd((polygon_oracle(p + Vec2(h, 0), corners) - polygon_oracle(p - Vec2(h, 0), corners)) / (2 * h),
                  (polygon_oracle(p + Vec2(0, h), corners) - polygon_oracle(p - Vec2(0, h), corners)) / (2 * h));
    EXPECT_LE((d.gradient - fd).norm(), 1e-5) << p.transpose();
  }
}

TEST(SignedDistanceTest, Circle) {
  const GraspTarget circle(Circle{Vec2(0.3, -0.4), 0.1});
  EXPECT_NEAR(circle.distance(Vec2(0.3, -0.4)).value, -0.1, 1e-15);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(-0.5, 0.5);
  for (int n = 0; n < 100; ++n) {
    const Vec2 p(coord(rng), coord(rng));
    const Vec2 r = p - Vec2(0.3, -0.4);
    const SignedDistance d = circle.distance(p);
    EXPECT_NEAR(d.value, r.norm() - 0.1, 1e-14);
    EXPECT_LE((d.gradient - r.normalized()).norm(), 1e-12);
    const Eigen::Matrix2d hess =
        (Eigen::Matrix2d::Identity() - r.normalized() * r.normalized().transpose()) / r.norm();
    EXPECT_LE((d.hessian - hess).norm(), 1e-10);
  }
}

TEST(SignedDistanceTest, SquareMatchesPolygonOracle) {
  const Vec2 c(0.1, -0.2);
  check_against_oracle(GraspTarget(Square{c, 0.15}), square_corners(c, 0.15));
}

TEST(SignedDistanceTest, PolygonMatchesOracle) {
  check_against_oracle(GraspTarget(ConvexPolygon{kPentagon}), kPentagon);
}

TEST(SignedDistanceTest, DiagonalFromSquareCorner) {
  const GraspTarget square(Square{Vec2::Zero(), 0.1});
  const double d = 0.05;
  const SignedDistance sd = square.distance(Vec2(0.1 + d, 0.1 + d));
  EXPECT_NEAR(sd.value, d * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sd.gradient.x(), std::sqrt(0.5), 1e-15);
}

TEST(GraspTargetTest, Barycenter) {
  EXPECT_EQ(GraspTarget(Circle{Vec2(0.2, 0.3), 0.1}).barycenter(), Vec2(0.2, 0.3));
  EXPECT_LE((GraspTarget(Square{Vec2(-0.2, 0.1), 0.3}).barycenter() - Vec2(-0.2, 0.1)).norm(), 1e-15);
  const std::vector<Vec2> triangle = {{0.0, 0.0}, {0.6, 0.0}, {0.0, 0.3}};
  EXPECT_LE((GraspTarget(ConvexPolygon{triangle}).barycenter() - Vec2(0.2, 0.1)).norm(), 1e-15);
}

TEST(GraspTargetTest, DegenerateShapesThrow) {
  EXPECT_THROW(GraspTarget(Circle{Vec2::Zero(), 0.0}), ConfigError);
  EXPECT_THROW(GraspTarget(Square{Vec2::Zero(), -1.0}), ConfigError);
  std::vector<Vec2> clockwise(kPentagon.rbegin(), kPentagon.rend());
  EXPECT_THROW(GraspTarget(ConvexPolygon{clockwise}), ConfigError);
  EXPECT_THROW(GraspTarget(ConvexPolygon{{{0, 0}, {1, 0}, {1, 1}, {0.9, 0.2}}}), ConfigError);
  EXPECT_THROW(GraspTarget(ConvexPolygon{{{0, 0}, {1, 0}}}), ConfigError);
}

TEST(GraspWeightTest, IntervalMass) {
  const Grid grid(51);
  const ScalarField c = GraspWeight::interval(0.4, 1.0, 2.0).nodal_coefficients(grid);
  EXPECT_NEAR(c.sum(), 2.0 * 0.6 + 2.0 * 0.01, 1e-12);
  EXPECT_EQ(c(19), 0.0);
  EXPECT_NEAR(c(20), 0.04, 1e-15);
  EXPECT_NEAR(c(50), 0.02, 1e-15);
}

TEST(GraspWeightTest, PointMassesSnap) {
  const Grid grid(51);
  std::vector<std::string> warnings;
  const ScalarField c = GraspWeight::points({0.55, 0.775, 1.0}).nodal_coefficients(grid, &warnings);
  EXPECT_EQ(c.sum(), 3.0);
  EXPECT_EQ(c(28), 1.0);
  EXPECT_EQ(c(39), 1.0);
  EXPECT_EQ(c(50), 1.0);
  EXPECT_TRUE(warnings.empty());
}

TEST(GraspCostTest, MatchesBruteForce) {
  const Grid grid(21);
  ModelParams params = testing::arm_params(grid);
  const GraspTarget target(Circle{Vec2(0.05, -0.5), 0.1});
  const GraspProblem problem(params, ActuationMask::from_intervals({{0.0, 0.2}}), target,
                             GraspWeight::interval(0.6));
  std::mt19937_64 rng(8);
  const VectorField q = rest_shape(grid) + testing::random_field(21, rng, 0.03);
  ScalarField u = ScalarField::LinSpaced(21, -0.8, 0.9);

  double control = 0.0, obstacle = 0.0, attraction = 0.0;
  for (int i = 0; i < 21; ++i) {
    const double s = grid.s(i);
    const double w = (i == 0 || i == 20) ? 0.5 * 0.05 : 0.05;
    if (s > 0.2 + 1e-12) control += 0.5 * w * u(i) * u(i);
    const double dist = (q.col(i) - Vec2(0.05, -0.5)).norm() - 0.1;
    if (dist < 0.0) {
      obstacle += 0.5 / params.tau * w * dist * dist;
    } else if (s >= 0.6 - 1e-12) {
      attraction += 0.5 / params.tau * w * dist * dist;
    }
  }
  const GraspCost cost = grasp_cost(q, u, problem);
  EXPECT_NEAR(cost.control, control, 1e-14);
  EXPECT_NEAR(cost.obstacle, obstacle, 1e-10 * (1.0 + obstacle));
  EXPECT_NEAR(cost.attraction, attraction, 1e-10 * attraction);
  EXPECT_GT(obstacle, 0.0);

  const NodalPenalty penalty = contact_penalty(problem);
  VectorField grad;
  std::vector<Eigen::Matrix2d> hess;
  EXPECT_NEAR(penalty(q, &grad, &hess), obstacle + attraction, 1e-10 * (obstacle + attraction));
  for (int i = 0; i < 21; ++i) {
    for (int c = 0; c < 2; ++c) {
      constexpr double h = 1e-7;
      VectorField qp = q, qm = q;
      qp(c, i) += h;
      qm(c, i) -= h;
      const double fd = (penalty(qp, nullptr, nullptr) - penalty(qm, nullptr, nullptr)) / (2 * h);
      EXPECT_NEAR(grad(c, i), fd, 1e-5 * (1.0 + std::abs(fd))) << i << "," << c;
    }
  }
}

TEST(GraspSolverTest, ReachesCircleWithoutPenetration) {
  const Grid grid(51);
  const GraspProblem problem(testing::arm_params(grid), {}, GraspTarget(Circle{Vec2(0.3563, -0.4423), 0.1}),
                             GraspWeight::interval(0.6));
  const GraspSolution sol = solve_static_grasping(problem);
  ASSERT_TRUE(sol.report.solver.converged) << sol.report.solver.termination;
  EXPECT_LE(sol.report.max_penetration, 1e-6);
  EXPECT_GT(sol.report.contact_nodes, 0);
}

}  // namespace
}  // namespace softarm
