#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "softarm/params.hpp"
#include "softarm/static_solver.hpp"
#include "softarm/types.hpp"

namespace softarm {

struct Circle {
  Vec2 center;
  double radius;
};

/// Axis-aligned square of side 2 * half_side.
struct Square {
  Vec2 center;
  double half_side;
};

/// Vertices in counterclockwise order.
struct ConvexPolygon {
  std::vector<Vec2> vertices;
};

/// Signed distance to the boundary, negative inside, with its first two derivatives.
/// The gradient is the unit outward direction; on measure-zero sets (circle center,
/// equidistant features) a fixed one-sided limit is returned.
struct SignedDistance {
  double value = 0.0;
  Vec2 gradient = Vec2::Zero();
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

class GraspTarget {
 public:
  using Shape = std::variant<Circle, Square, ConvexPolygon>;

  /// Throws ConfigError for degenerate shapes (non-positive size, polygon that is not
  /// strictly convex and counterclockwise).
  explicit GraspTarget(Shape shape);

  const Shape& shape() const { return shape_; }
  SignedDistance distance(const Vec2& p) const;
  /// Area centroid.
  Vec2 barycenter() const;
  /// Short description, e.g. "circle".
  std::string kind() const;

 private:
  Shape shape_;
  std::vector<Vec2> corners_;
};

/// The grasp weight mu0: an interval density c * chi_[lo, hi] or a sum of unit point masses.
class GraspWeight {
 public:
  static GraspWeight interval(double lo, double hi = 1.0, double density = 1.0);
  static GraspWeight points(std::vector<double> locations);

  bool is_points() const { return points_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double density() const { return density_; }
  const std::vector<double>& locations() const { return locations_; }

  /// Per-node quadrature coefficients of the attraction term: w_i ds mu0(s_i) for
  /// intervals, 1 at the nearest node of each point mass. Snapping a point by more than
  /// ds/2 appends a warning.
  ScalarField nodal_coefficients(const Grid& grid, std::vector<std::string>* warnings = nullptr) const;

 private:
  bool points_ = false;
  double lo_ = 0.0;
  double hi_ = 1.0;
  double density_ = 1.0;
  std::vector<double> locations_;
};

class GraspProblem {
 public:
  GraspProblem(const ModelParams& params, ActuationMask mask, GraspTarget target,
               GraspWeight weight, bool curvature_constraint = true);

  /// Elastica data; its target point is the barycenter of the object.
  const StaticProblem& base() const { return base_; }
  const GraspTarget& target() const { return target_; }
  const GraspWeight& weight() const { return weight_; }
  const ScalarField& attraction_coefficients() const { return attraction_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  StaticProblem base_;
  GraspTarget target_;
  GraspWeight weight_;
  ScalarField attraction_;
  std::vector<std::string> warnings_;
};

struct GraspCost {
  double control = 0.0;
  double obstacle = 0.0;
  double attraction = 0.0;
  double total() const { return control + obstacle + attraction; }
};

/// (1/2) int_{[0,1] minus I} u^2 + (1/2 tau) int dist^2 (chi_inside + mu0 chi_outside).
GraspCost grasp_cost(const VectorField& q, const ScalarField& u, const GraspProblem& problem);

/// The contact part of grasp_cost as a nodal penalty for the elastica program.
NodalPenalty contact_penalty(const GraspProblem& problem);

struct GraspReport {
  StaticReport solver;
  GraspCost cost;
  /// max_s (-dist(q(s)))_+.
  double max_penetration = 0.0;
  /// Attracted nodes within `contact_tolerance` of the boundary.
  int contact_nodes = 0;
  int attracted_nodes = 0;
  double mean_attracted_gap = 0.0;
};

struct GraspOptions {
  GraspOptions() { solver.solver.inner_method = InnerMethod::kNewton; }

  StaticOptions solver;
  double contact_tolerance = 1e-3;
  /// Also impose dist(q_i) >= 0 as a hard constraint at every node. Without it the
  /// obstacle acts only through the quadratic penalty and admits penetration of order tau.
  bool hard_obstacle = true;
};

struct GraspSolution {
  ScalarField control;
  VectorField curve;
  ScalarField kappa;
  GraspReport report;
};

/// Minimizes the grasp functional in elastica form. Without an initial curve the solve is
/// warm-started from static reachability toward the barycenter of the object.
GraspSolution solve_static_grasping(const GraspProblem& problem, const GraspOptions& options = {},
                                    const std::optional<VectorField>& initial = {});

}  // namespace softarm
