#include "softarm/grasping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "softarm/errors.hpp"
#include "softarm/planar.hpp"

namespace softarm {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

SignedDistance circle_distance(const Circle& c, const Vec2& p) {
  SignedDistance out;
  const Vec2 offset = p - c.center;
  const double r = offset.norm();
  out.value = r - c.radius;
  if (r == 0.0) {
    out.gradient = Vec2::UnitX();
    return out;
  }
  const Vec2 n = offset / r;
  out.gradient = n;
  out.hessian = (Eigen::Matrix2d::Identity() - n * n.transpose()) / r;
  return out;
}

SignedDistance polygon_distance(const std::vector<Vec2>& corners, const Vec2& p) {
  const int m = static_cast<int>(corners.size());
  double best = std::numeric_limits<double>::infinity();
  Vec2 closest = corners[0];
  bool at_vertex = false;
  int best_edge = 0;
  bool inside = true;
  for (int e = 0; e < m; ++e) {
    const Vec2& a = corners[e];
    const Vec2& b = corners[(e + 1) % m];
    const Vec2 edge = b - a;
    if (cross2(edge, p - a) <= 0.0) inside = false;
    const double t = (p - a).dot(edge) / edge.squaredNorm();
    const double clamped = std::clamp(t, 0.0, 1.0);
    const Vec2 c = a + clamped * edge;
    const double d = (p - c).norm();
    if (d < best) {
      best = d;
      closest = c;
      at_vertex = t <= 0.0 || t >= 1.0;
      best_edge = e;
    }
  }
  SignedDistance out;
  const double sign = inside ? -1.0 : 1.0;
  out.value = sign * best;
  if (best == 0.0) {
    const Vec2 edge = corners[(best_edge + 1) % m] - corners[best_edge];
    out.gradient = perp(edge).normalized();
    return out;
  }
  const Vec2 n = (p - closest) / best;
  out.gradient = sign * n;
  if (at_vertex) out.hessian = sign * (Eigen::Matrix2d::Identity() - n * n.transpose()) / best;
  return out;
}

void validate_polygon(const std::vector<Vec2>& v) {
  const int m = static_cast<int>(v.size());
  if (m < 3) throw ConfigError("polygon target needs at least 3 vertices");
  double turning = 0.0;
  for (int i = 0; i < m; ++i) {
    const Vec2 e0 = v[(i + 1) % m] - v[i];
    const Vec2 e1 = v[(i + 2) % m] - v[(i + 1) % m];
    if (!(e0.norm() > 0.0)) throw ConfigError("polygon target has repeated vertices");
    const double turn = std::atan2(cross2(e0, e1), e0.dot(e1));
    if (!(turn > 0.0)) {
      throw ConfigError("polygon target must be strictly convex and counterclockwise");
    }
    turning += turn;
  }
  if (std::abs(turning - 2.0 * std::numbers::pi) > 1e-9) {
    throw ConfigError("polygon target is not simple");
  }
}

}  // namespace

GraspTarget::GraspTarget(Shape shape) : shape_(std::move(shape)) {
  std::visit(Overloaded{
                 [](const Circle& c) {
                   if (!(c.radius > 0.0)) throw ConfigError("circle radius must be positive");
                 },
                 [this](const Square& sq) {
                   if (!(sq.half_side > 0.0)) {
                     throw ConfigError("square half-side must be positive");
                   }
                   const double h = sq.half_side;
                   corners_ = {sq.center + Vec2(-h, -h), sq.center + Vec2(h, -h),
                               sq.center + Vec2(h, h), sq.center + Vec2(-h, h)};
                 },
                 [this](const ConvexPolygon& poly) {
                   validate_polygon(poly.vertices);
                   corners_ = poly.vertices;
                 },
             },
             shape_);
}

SignedDistance GraspTarget::distance(const Vec2& p) const {
  if (const auto* c = std::get_if<Circle>(&shape_)) return circle_distance(*c, p);
  return polygon_distance(corners_, p);
}

Vec2 GraspTarget::barycenter() const {
  if (const auto* c = std::get_if<Circle>(&shape_)) return c->center;
  if (const auto* sq = std::get_if<Square>(&shape_)) return sq->center;
  const int m = static_cast<int>(corners_.size());
  double area = 0.0;
  Vec2 moment = Vec2::Zero();
  for (int i = 0; i < m; ++i) {
    const Vec2& a = corners_[i];
    const Vec2& b = corners_[(i + 1) % m];
    const double w = cross2(a, b);
    area += 0.5 * w;
    moment += w * (a + b) / 6.0;
  }
  return moment / area;
}

std::string GraspTarget::kind() const {
  return std::visit(Overloaded{[](const Circle&) { return std::string("circle"); },
                               [](const Square&) { return std::string("square"); },
                               [](const ConvexPolygon&) { return std::string("polygon"); }},
                    shape_);
}

GraspWeight GraspWeight::interval(double lo, double hi, double density) {
  if (!(lo <= hi) || lo < 0.0 || hi > 1.0) throw ConfigError("grasp interval must lie in [0, 1]");
  if (!(density >= 0.0)) throw ConfigError("grasp weight density must be nonnegative");
  GraspWeight w;
  w.lo_ = lo;
  w.hi_ = hi;
  w.density_ = density;
  return w;
}

GraspWeight GraspWeight::points(std::vector<double> locations) {
  if (locations.empty()) throw ConfigError("point-mass grasp weight needs at least one point");
  for (double s : locations) {
    if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("point mass outside [0, 1]");
  }
  GraspWeight w;
  w.points_ = true;
  w.locations_ = std::move(locations);
  return w;
}

ScalarField GraspWeight::nodal_coefficients(const Grid& grid,
                                            std::vector<std::string>* warnings) const {
  const int n = grid.size();
  ScalarField c = ScalarField::Zero(n);
  if (points_) {
    for (double s : locations_) {
      const int node = grid.nearest_node(s);
      const double moved = std::abs(grid.s(node) - s);
      if (warnings && moved > 0.5 * grid.ds() + 1e-12) {
        warnings->push_back("point mass at s = " + std::to_string(s) + " snapped to node " +
                            std::to_string(node));
      }
      c(node) += 1.0;
    }
    return c;
  }
  constexpr double kTol = 1e-12;
  for (int i = 0; i < n; ++i) {
    const double s = grid.s(i);
    if (s >= lo_ - kTol && s <= hi_ + kTol) c(i) = density_ * grid.weight(i) * grid.ds();
  }
  return c;
}

GraspProblem::GraspProblem(const ModelParams& params, ActuationMask mask, GraspTarget target,
                           GraspWeight weight, bool curvature_constraint)
    : base_(params, std::move(mask), target.barycenter(), curvature_constraint),
      target_(std::move(target)),
      weight_(std::move(weight)) {
  attraction_ = weight_.nodal_coefficients(base_.grid(), &warnings_);
}

namespace {

struct ContactTerms {
  double obstacle = 0.0;
  double attraction = 0.0;
};

ContactTerms contact_terms(const VectorField& q, const GraspProblem& problem, VectorField* grad,
                           std::vector<Eigen::Matrix2d>* hess) {
  const Grid& grid = problem.base().grid();
  const int n = grid.size();
  if (q.cols() != n) throw SizingError("curve does not match grid");
  const double inv_tau = 1.0 / problem.base().params().tau;
  const ScalarField& attraction = problem.attraction_coefficients();
  if (grad) *grad = VectorField::Zero(2, n);
  if (hess) hess->assign(n, Eigen::Matrix2d::Zero());
  ContactTerms terms;
  for (int i = 0; i < n; ++i) {
    const SignedDistance d = problem.target().distance(q.col(i));
    double coef = 0.0;
    if (d.value < 0.0) {
      coef = grid.weight(i) * grid.ds() * inv_tau;
      terms.obstacle += 0.5 * coef * d.value * d.value;
    } else if (attraction(i) > 0.0) {
      coef = attraction(i) * inv_tau;
      terms.attraction += 0.5 * coef * d.value * d.value;
    }
    if (coef == 0.0) continue;
    if (grad) grad->col(i) = coef * d.value * d.gradient;
    if (hess) {
      (*hess)[i] = coef * (d.gradient * d.gradient.transpose() + d.value * d.hessian);
    }
  }
  return terms;
}

}  // namespace

GraspCost grasp_cost(const VectorField& q, const ScalarField& u, const GraspProblem& problem) {
  const StaticProblem& base = problem.base();
  if (u.size() != base.grid().size()) throw SizingError("control does not match grid");
  ScalarField sq = u.cwiseAbs2();
  for (int i = 0; i < sq.size(); ++i) {
    if (base.deactivated()[i]) sq(i) = 0.0;
  }
  const ContactTerms terms = contact_terms(q, problem, nullptr, nullptr);
  GraspCost c;
  c.control = 0.5 * base.grid().integrate(sq);
  c.obstacle = terms.obstacle;
  c.attraction = terms.attraction;
  return c;
}

NodalPenalty contact_penalty(const GraspProblem& problem) {
  return [&problem](const VectorField& q, VectorField* grad, std::vector<Eigen::Matrix2d>* hess) {
    const ContactTerms terms = contact_terms(q, problem, grad, hess);
    return terms.obstacle + terms.attraction;
  };
}

GraspSolution solve_static_grasping(const GraspProblem& problem, const GraspOptions& options,
                                    const std::optional<VectorField>& initial) {
  const StaticProblem& base = problem.base();
  VectorField start;
  if (initial) {
    start = *initial;
  } else {
    start = solve_static_reachability(base, options.solver).curve;
  }
  NodalConstraint obstacle;
  if (options.hard_obstacle) {
    obstacle = [&problem](const Vec2& p) {
      const SignedDistance d = problem.target().distance(p);
      return NodalBound{-d.value, -d.gradient, -d.hessian};
    };
  }
  StaticSolution sol =
      solve_elastica(base, contact_penalty(problem), options.solver, start, obstacle);

  GraspSolution out;
  out.control = std::move(sol.control);
  out.curve = std::move(sol.curve);
  out.kappa = std::move(sol.kappa);
  GraspReport& rep = out.report;
  rep.solver = std::move(sol.report);
  rep.solver.warnings.insert(rep.solver.warnings.end(), problem.warnings().begin(),
                             problem.warnings().end());
  rep.cost = grasp_cost(out.curve, out.control, problem);
  rep.solver.target_term = rep.cost.obstacle + rep.cost.attraction;
  rep.solver.cost = rep.cost.total();

  const ScalarField& attraction = problem.attraction_coefficients();
  double gap_sum = 0.0;
  for (int i = 0; i < out.curve.cols(); ++i) {
    const double d = problem.target().distance(out.curve.col(i)).value;
    rep.max_penetration = std::max(rep.max_penetration, -d);
    if (attraction(i) > 0.0) {
      ++rep.attracted_nodes;
      gap_sum += std::abs(d);
      if (std::abs(d) <= options.contact_tolerance) ++rep.contact_nodes;
    }
  }
  if (rep.attracted_nodes > 0) rep.mean_attracted_gap = gap_sum / rep.attracted_nodes;
  return out;
}

}  // namespace softarm
