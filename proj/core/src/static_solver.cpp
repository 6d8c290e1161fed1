#include "softarm/static_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "softarm/errors.hpp"
#include "softarm/fields.hpp"

namespace softarm {

StaticProblem::StaticProblem(const ModelParams& params, ActuationMask mask, const Vec2& target,
                             bool curvature_constraint)
    : params_(deactivate(params, mask)),
      mask_(std::move(mask)),
      target_(target),
      curvature_constraint_(curvature_constraint) {
  params_.validate();
  omega_bar_ = params_.omega_bar();
  deactivated_ = mask_.nodes(params_.grid);
}

VectorField rest_shape(const Grid& grid) {
  VectorField q = VectorField::Zero(2, grid.size());
  for (int i = 0; i < grid.size(); ++i) q(1, i) = -grid.s(i);
  return q;
}

VectorField integrate_shape(const ScalarField& u, const StaticProblem& problem) {
  const Grid& grid = problem.grid();
  const int n = grid.size();
  if (u.size() != n) throw SizingError("control length does not match grid");
  const ScalarField rate = problem.omega_bar().cwiseProduct(u);
  const double ds = grid.ds();
  VectorField q = VectorField::Zero(2, n);
  double theta = -0.5 * std::numbers::pi;
  for (int i = 0; i + 1 < n; ++i) {
    const double next = theta + 0.5 * ds * (rate(i) + rate(i + 1));
    const double mid = 0.5 * (theta + next);
    q.col(i + 1) = q.col(i) + ds * Vec2(std::cos(mid), std::sin(mid));
    theta = next;
  }
  return q;
}

namespace {

double masked_control_energy(const ScalarField& u, const StaticProblem& problem) {
  ScalarField sq = u.cwiseAbs2();
  for (int i = 0; i < sq.size(); ++i) {
    if (problem.deactivated()[i]) sq(i) = 0.0;
  }
  return 0.5 * problem.grid().integrate(sq);
}

}  // namespace

StaticCost static_cost(const ScalarField& u, const StaticProblem& problem) {
  const VectorField q = integrate_shape(u, problem);
  StaticCost c;
  c.control = masked_control_energy(u, problem);
  c.target = (q.col(q.cols() - 1) - problem.target()).squaredNorm() / (2.0 * problem.params().tau);
  return c;
}

StaticSolution solve_elastica(const StaticProblem& problem, const NodalPenalty& penalty,
                              const StaticOptions& options,
                              const std::optional<VectorField>& initial,
                              const NodalConstraint& constraint) {
  const Grid& grid = problem.grid();
  const int n = grid.size();
  ElasticaProblem program(grid, problem.omega_bar(), problem.deactivated(), penalty,
                          problem.curvature_constraint());
  if (constraint) program.set_nodal_constraint(constraint);
  const VectorField start = initial ? *initial : rest_shape(grid);
  if (start.cols() != n) throw SizingError("initial curve does not match grid");

  const AugmentedLagrangianResult res =
      solve_augmented_lagrangian(program, program.from_curve(start), options.solver);

  StaticSolution sol;
  sol.curve = program.to_curve(res.x);
  const RodStencil& stencil = program.stencil();
  const RodStencil::Geometry geo = stencil.evaluate(sol.curve);
  sol.kappa = stencil.signed_curvature(sol.curve);
  sol.control = ScalarField::Zero(n);
  StaticReport& rep = sol.report;
  bool exceeded = false;
  for (int i : program.active_nodes()) {
    const double magnitude = geo.curvature.col(i).norm() / problem.omega_bar()(i);
    double u = sol.kappa(i) < 0.0 ? -magnitude : magnitude;
    if (std::abs(u) > 1.0) {
      exceeded = true;
      if (problem.curvature_constraint()) u = std::clamp(u, -1.0, 1.0);
    }
    sol.control(i) = u;
  }
  if (exceeded && !problem.curvature_constraint()) {
    rep.warnings.push_back(
        "curvature constraint disabled: recovered control exceeds the unit bound");
  }
  if (problem.params().mu(n - 1) != 0.0) {
    rep.warnings.push_back("mu(1) != 0: the stationary reduction assumes a vanishing control "
                           "penalty at the free end");
  }

  rep.converged = res.report.converged;
  rep.termination = res.report.termination;
  rep.outer_iterations = res.report.outer_iterations;
  rep.inner_iterations = res.report.inner_iterations;
  rep.equality_residual = res.report.equality_residual;
  rep.inequality_residual = res.report.inequality_residual;
  rep.stationarity = res.report.stationarity;
  rep.stretch_residual = stretch_residual(sol.curve, grid);
  rep.curvature_energy = program.curvature_energy(sol.curve);
  rep.control_energy = masked_control_energy(sol.control, problem);
  return sol;
}

StaticSolution solve_static_reachability(const StaticProblem& problem,
                                         const StaticOptions& options,
                                         const std::optional<VectorField>& initial) {
  const int tip = problem.grid().size() - 1;
  const double weight = 1.0 / problem.params().tau;
  const Vec2 target = problem.target();
  NodalPenalty penalty = [=](const VectorField& q, VectorField* grad,
                             std::vector<Eigen::Matrix2d>* hess) {
    const Vec2 miss = q.col(tip) - target;
    if (grad) {
      *grad = VectorField::Zero(2, q.cols());
      grad->col(tip) = weight * miss;
    }
    if (hess) {
      hess->assign(q.cols(), Eigen::Matrix2d::Zero());
      (*hess)[tip] = weight * Eigen::Matrix2d::Identity();
    }
    return 0.5 * weight * miss.squaredNorm();
  };
  StaticSolution sol = solve_elastica(problem, penalty, options, initial);
  sol.report.target_term = penalty(sol.curve, nullptr, nullptr);
  sol.report.cost = sol.report.control_energy + sol.report.target_term;
  return sol;
}

}  // namespace softarm
