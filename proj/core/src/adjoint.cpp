#include "softarm/adjoint.hpp"

#include <algorithm>
#include <cmath>

#include "softarm/errors.hpp"

namespace softarm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

DynamicProblem::DynamicProblem(const ModelParams& params, ActuationMask mask, const Vec2& target,
                               const TimeGrid& time, RodState initial, DynamicsOptions dynamics)
    : model_(deactivate(params, mask)),
      mask_(std::move(mask)),
      deactivated_(mask_.nodes(params.grid)),
      target_(target),
      time_(time),
      initial_(std::move(initial)),
      dynamics_(dynamics) {
  if (!(time.dt > 0.0) || time.n_steps < 1) throw ConfigError("time grid needs dt > 0 and steps");
}

namespace {

double half_integral_sq(const ScalarField& u, const Grid& grid) {
  return 0.5 * grid.integrate(u.cwiseAbs2());
}

}  // namespace

CostSeries cost_series(const ForwardRun& run, const DynamicProblem& problem) {
  const Grid& grid = problem.model().grid();
  const int tip = grid.size() - 1;
  const double tau = problem.params().tau;
  const int n = run.time.n_steps;
  CostSeries s;
  for (int k = 0; k <= n; ++k) {
    const RodState& st = run.states[k];
    s.t.push_back(k * run.time.dt);
    s.tip.push_back((st.q.col(tip) - problem.target()).squaredNorm() / (2.0 * tau));
    s.control.push_back(half_integral_sq(run.control.at(std::min(k, n - 1)), grid));
    s.kinetic.push_back(problem.model().kinetic_energy(st.v));
  }
  return s;
}

DynamicCost dynamic_cost(const CostSeries& series, double dt) {
  DynamicCost c;
  const std::size_t n = series.t.size() - 1;
  for (std::size_t k = 0; k < n; ++k) {
    c.tip += dt * series.tip[k];
    c.control += dt * series.control[k];
  }
  c.terminal_kinetic = series.kinetic[n];
  return c;
}

void linearized_maps(const VectorField& q, const VectorField& qbar, const ModelParams& params,
                     ScalarField& g_bar, ScalarField& h_bar) {
  RodPotential(params).linearized_maps(q, qbar, g_bar, h_bar);
}

AdjointRun solve_adjoint(const ForwardRun& forward, const DynamicProblem& problem) {
  const RodModel& model = problem.model();
  const Grid& grid = model.grid();
  const int n = grid.size();
  const int steps = forward.time.n_steps;
  if (static_cast<int>(forward.states.size()) != steps + 1) {
    throw SizingError("forward run is missing stored steps");
  }
  const double dt = forward.time.dt;
  const double tip_weight = dt / problem.params().tau;
  const ScalarField& im = model.inverse_masses();

  AdjointRun adj;
  adj.qbar.resize(steps + 1);
  adj.sbar.resize(steps + 1);
  adj.control_sensitivity = MatrixXd::Zero(n, steps);

  VectorField q_cot = VectorField::Zero(2, n);
  VectorField v_cot = forward.states[steps].v * model.masses().asDiagonal();
  adj.qbar[steps] = -(v_cot * im.asDiagonal());
  adj.sbar[steps] = ScalarField::Zero(n);

  std::vector<SubstepTape> tapes;
  for (int k = steps - 1; k >= 0; --k) {
    const ScalarField u = forward.control.at(k);
    const int substeps = forward.substeps[k];
    const double h = dt / substeps;
    tapes.resize(substeps);
    VectorField q = forward.states[k].q;
    VectorField v = forward.states[k].v;
    for (int j = 0; j < substeps; ++j) {
      RodState next = verlet_substep(model, q, v, u, h, &tapes[j]);
      q = std::move(next.q);
      v = std::move(next.v);
    }
    ScalarField u_cot = ScalarField::Zero(n);
    VectorXd zeta;
    for (int j = substeps - 1; j >= 0; --j) {
      VectorField qb = VectorField::Zero(2, n);
      VectorField vb = VectorField::Zero(2, n);
      verlet_substep_transpose(model, tapes[j], u, h, q_cot, v_cot, qb, vb, u_cot,
                               j == 0 ? &zeta : nullptr);
      q_cot = std::move(qb);
      v_cot = std::move(vb);
    }
    q_cot.col(n - 1) += tip_weight * (forward.states[k].q.col(n - 1) - problem.target());
    q_cot.col(0).setZero();
    adj.control_sensitivity.col(k) = u_cot;
    adj.qbar[k] = -(v_cot * im.asDiagonal());
    adj.sbar[k] = model.nodal_tension(zeta);
  }
  return adj;
}

MatrixXd control_gradient(const ForwardRun& forward, const AdjointRun& adjoint,
                          const DynamicProblem& problem) {
  const Grid& grid = problem.model().grid();
  const double dt = forward.time.dt;
  MatrixXd g = forward.control.values;
  for (int i = 0; i < grid.size(); ++i) {
    if (problem.deactivated()[i]) {
      g.row(i).setZero();
      continue;
    }
    g.row(i) += adjoint.control_sensitivity.row(i) / (dt * grid.weight(i) * grid.ds());
  }
  return g;
}

double space_time_dot(const MatrixXd& a, const MatrixXd& b, const Grid& grid, double dt) {
  double acc = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    acc += grid.weight(i) * a.row(i).dot(b.row(i));
  }
  return acc * grid.ds() * dt;
}

SpaceTimeControl project_control(const SpaceTimeControl& u, const std::vector<bool>& deactivated) {
  SpaceTimeControl out;
  out.values = u.values.cwiseMax(-1.0).cwiseMin(1.0);
  for (int i = 0; i < out.n_nodes(); ++i) {
    if (deactivated[i]) out.values.row(i).setZero();
  }
  return out;
}

DynamicSolution evaluate_dynamic(const DynamicProblem& problem, const SpaceTimeControl& control) {
  return evaluate_dynamic(problem, control, problem.dynamics());
}

DynamicSolution evaluate_dynamic(const DynamicProblem& problem, const SpaceTimeControl& control,
                                 const DynamicsOptions& dynamics) {
  DynamicSolution sol;
  sol.control = control;
  sol.run = simulate(problem.model(), problem.initial(), control, problem.time(), dynamics);
  sol.series = cost_series(sol.run, problem);
  sol.cost = dynamic_cost(sol.series, problem.time().dt);
  return sol;
}

DynamicSolution optimize_dynamic(const DynamicProblem& problem, const SpaceTimeControl& initial,
                                 const DynamicOptimizerOptions& options) {
  const Grid& grid = problem.model().grid();
  const double dt = problem.time().dt;
  DynamicsOptions dynamics = problem.dynamics();
  DynamicSolution current =
      evaluate_dynamic(problem, project_control(initial, problem.deactivated()), dynamics);
  if (dynamics.substeps <= 0) {
    const int most = *std::max_element(current.run.substeps.begin(), current.run.substeps.end());
    dynamics.substeps = static_cast<int>(std::ceil(1.25 * most));
    current = evaluate_dynamic(problem, current.control, dynamics);
  }
  OptimizationReport report;
  report.substeps = dynamics.substeps;
  report.termination = "iteration cap";
  double step = options.initial_step;
  auto gradient_of = [&problem](const DynamicSolution& sol) {
    return control_gradient(sol.run, solve_adjoint(sol.run, problem), problem);
  };
  MatrixXd grad = gradient_of(current);

  for (int it = 0;; ++it) {
    SpaceTimeControl trial_point;
    trial_point.values = current.control.values - grad;
    const MatrixXd residual =
        current.control.values - project_control(trial_point, problem.deactivated()).values;
    IterationRecord rec;
    rec.iteration = it;
    rec.cost = current.cost;
    rec.projected_gradient = std::sqrt(space_time_dot(residual, residual, grid, dt));
    if (rec.projected_gradient <= options.tolerance) {
      report.iterations.push_back(rec);
      report.converged = true;
      report.termination = "projected gradient below tolerance";
      break;
    }
    if (it >= options.max_iterations) {
      report.iterations.push_back(rec);
      break;
    }
    const double grad_max = std::max(grad.cwiseAbs().maxCoeff(), 1e-300);
    if (!(step > 0.0)) step = 0.1 / grad_max;
    if (step * grad_max < options.min_control_change) {
      report.iterations.push_back(rec);
      report.termination = "step below control resolution";
      break;
    }

    bool accepted = false;
    for (rec.backtracks = 0; rec.backtracks <= options.max_backtracks; ++rec.backtracks) {
      SpaceTimeControl candidate;
      candidate.values = current.control.values - step * grad;
      candidate = project_control(candidate, problem.deactivated());
      const MatrixXd direction = candidate.values - current.control.values;
      const double decrease = space_time_dot(grad, direction, grid, dt);
      try {
        DynamicSolution next = evaluate_dynamic(problem, candidate, dynamics);
        if (next.cost.total() <= current.cost.total() + options.armijo * decrease) {
          MatrixXd next_grad = gradient_of(next);
          if (next_grad.cwiseAbs().maxCoeff() <= options.max_gradient_growth * grad_max) {
            current = std::move(next);
            grad = std::move(next_grad);
            accepted = true;
            break;
          }
        }
      } catch (const NumericalInstability&) {
      }
      step *= 0.5;
    }
    rec.step = step;
    report.iterations.push_back(rec);
    if (!accepted) {
      report.termination = "line search failed";
      break;
    }
    ++report.accepted;
    step *= 2.0;
  }
  current.report = std::move(report);
  return current;
}

}  // namespace softarm
