#pragma once

#include <string>

#include <Eigen/Core>

namespace softarm {

/// Smooth nonlinear program  min f(x)  s.t.  c(x) = 0,  h(x) <= 0
/// with dense derivatives. Implementations supply exact constraint curvature.
class ConstrainedProblem {
 public:
  virtual ~ConstrainedProblem() = default;

  virtual int dimension() const = 0;
  virtual int equality_count() const = 0;
  virtual int inequality_count() const = 0;

  /// Objective value; fills the gradient and Hessian when requested.
  virtual double objective(const Eigen::VectorXd& x, Eigen::VectorXd* grad,
                           Eigen::MatrixXd* hess) const = 0;

  virtual Eigen::VectorXd equalities(const Eigen::VectorXd& x, Eigen::MatrixXd* jac) const = 0;
  virtual Eigen::VectorXd inequalities(const Eigen::VectorXd& x, Eigen::MatrixXd* jac) const = 0;

  /// hess += sum_j y_eq_j D^2 c_j(x) + sum_i y_in_i D^2 h_i(x).
  virtual void add_constraint_hessians(const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq,
                                       const Eigen::VectorXd& y_in,
                                       Eigen::MatrixXd& hess) const = 0;
};

/// Inner solver for the augmented Lagrangian subproblems. Both start from the exact
/// Hessian shifted to be positive definite; kBfgs then applies Powell-damped BFGS updates.
enum class InnerMethod { kNewton, kBfgs };

struct AugmentedLagrangianOptions {
  double constraint_tolerance = 1e-8;
  /// Relative to 1 + |grad f|_inf at the iterate.
  double stationarity_tolerance = 1e-6;
  int max_outer_iterations = 60;
  int max_inner_iterations = 400;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double max_penalty = 1e12;
  /// Grow the penalty when the violation did not drop below this fraction.
  double required_decrease = 0.25;
  InnerMethod inner_method = InnerMethod::kBfgs;
};

struct AugmentedLagrangianReport {
  bool converged = false;
  std::string termination;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double objective = 0.0;
  double equality_residual = 0.0;
  double inequality_residual = 0.0;
  double stationarity = 0.0;
  double penalty = 0.0;
};

struct AugmentedLagrangianResult {
  Eigen::VectorXd x;
  Eigen::VectorXd eq_multipliers;
  Eigen::VectorXd ineq_multipliers;
  AugmentedLagrangianReport report;
};

/// Method of multipliers (Rockafellar form for inequalities) with a line-searched
/// Newton or damped BFGS inner loop. Never throws on non-convergence; inspect the report.
AugmentedLagrangianResult solve_augmented_lagrangian(const ConstrainedProblem& problem,
                                                     const Eigen::VectorXd& x0,
                                                     const AugmentedLagrangianOptions& options);

}  // namespace softarm
