#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "softarm/dynamics.hpp"
#include "softarm/params.hpp"
#include "softarm/types.hpp"

namespace softarm {

/// Dynamic reachability data. `params()` has mu zeroed on the deactivated set.
class DynamicProblem {
 public:
  DynamicProblem(const ModelParams& params, ActuationMask mask, const Vec2& target,
                 const TimeGrid& time, RodState initial, DynamicsOptions dynamics = {});

  const ModelParams& params() const { return model_.params(); }
  const RodModel& model() const { return model_; }
  const ActuationMask& mask() const { return mask_; }
  const std::vector<bool>& deactivated() const { return deactivated_; }
  const Vec2& target() const { return target_; }
  const TimeGrid& time() const { return time_; }
  const RodState& initial() const { return initial_; }
  const DynamicsOptions& dynamics() const { return dynamics_; }

 private:
  RodModel model_;
  ActuationMask mask_;
  std::vector<bool> deactivated_;
  Vec2 target_;
  TimeGrid time_;
  RodState initial_;
  DynamicsOptions dynamics_;
};

/// Cost integrands sampled at t_k = k dt, k = 0..n_steps:
///   tip(t) = |q(1,t) - q*|^2 / (2 tau),  control(t) = (1/2) int u^2 ds,
///   kinetic(t) = (1/2) int rho |q_t|^2 ds.
/// control at t_k uses the control column active on [t_k, t_{k+1}) (the last one at T).
struct CostSeries {
  std::vector<double> t;
  std::vector<double> tip;
  std::vector<double> control;
  std::vector<double> kinetic;
};

/// J = dt sum_{k<n} (tip + control)(t_k) + kinetic(T).
struct DynamicCost {
  double tip = 0.0;
  double control = 0.0;
  double terminal_kinetic = 0.0;
  double total() const { return tip + control + terminal_kinetic; }
};

CostSeries cost_series(const ForwardRun& run, const DynamicProblem& problem);
DynamicCost dynamic_cost(const CostSeries& series, double dt);

/// Discrete adjoint of the forward scheme.
///
/// qbar[k] = -M^{-1} p_k where p_k is the cotangent of the nodal velocity at t_k, so that
/// qbar(T) = -q_t(T); sbar[k] is the adjoint tension at the start of macro step k.
struct AdjointRun {
  std::vector<VectorField> qbar;
  std::vector<ScalarField> sbar;
  /// Derivative of the state-dependent part of J with respect to u_{i,k} (nodes x steps).
  Eigen::MatrixXd control_sensitivity;
};

/// Linearized reaction and control maps: Gbar = 2 nu 1(|q_ss|^2 - omega^2) q_ss . qbar_ss and
/// Hbar = dH[q] qbar (the directional derivative of H), with the rod stencils.
void linearized_maps(const VectorField& q, const VectorField& qbar, const ModelParams& params,
                     ScalarField& g_bar, ScalarField& h_bar);

/// Backward sweep over the stored macro steps, recomputing substeps from each checkpoint.
AdjointRun solve_adjoint(const ForwardRun& forward, const DynamicProblem& problem);

/// L^2(space-time) gradient u + (state sensitivity) / (dt w_i ds), zero on the deactivated set.
Eigen::MatrixXd control_gradient(const ForwardRun& forward, const AdjointRun& adjoint,
                                 const DynamicProblem& problem);

/// Space-time L^2 inner product dt sum_k sum_i w_i ds a_ik b_ik.
double space_time_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Grid& grid,
                      double dt);

/// Clip to [-1, 1] and zero the deactivated nodes in every column.
SpaceTimeControl project_control(const SpaceTimeControl& u, const std::vector<bool>& deactivated);

struct DynamicOptimizerOptions {
  int max_iterations = 40;
  /// Stop when |u - P(u - grad)| in space-time L^2 falls below this.
  double tolerance = 1e-4;
  double armijo = 1e-4;
  int max_backtracks = 30;
  /// First trial step; 0 selects 0.1 / max|grad|.
  double initial_step = 0.0;
  /// Stop once the largest trial change of any control value drops below this.
  double min_control_change = 1e-14;
  /// A trial point whose gradient exceeds this multiple of the current one is rejected:
  /// the forward run there has become too ill-conditioned for first-order steps.
  double max_gradient_growth = 1e3;
};

struct IterationRecord {
  int iteration = 0;
  DynamicCost cost;
  double projected_gradient = 0.0;
  double step = 0.0;
  int backtracks = 0;
};

struct OptimizationReport {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  std::string termination;
  int accepted = 0;
  /// Substeps per macro step used by every run of the optimization.
  int substeps = 0;
};

struct DynamicSolution {
  SpaceTimeControl control;
  ForwardRun run;
  CostSeries series;
  DynamicCost cost;
  OptimizationReport report;
};

/// Projected gradient descent with Armijo backtracking (the step is reused between
/// iterations and doubled after each acceptance). With automatic substeps the count is
/// frozen at 1.25 times the largest count of the initial run, so J stays smooth in u.
DynamicSolution optimize_dynamic(const DynamicProblem& problem, const SpaceTimeControl& initial,
                                 const DynamicOptimizerOptions& options = {});

/// Forward run and cost of a fixed control.
DynamicSolution evaluate_dynamic(const DynamicProblem& problem, const SpaceTimeControl& control);
DynamicSolution evaluate_dynamic(const DynamicProblem& problem, const SpaceTimeControl& control,
                                 const DynamicsOptions& dynamics);

}  // namespace softarm
