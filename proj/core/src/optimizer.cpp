#include "softarm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

namespace softarm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double inf_norm(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const ConstrainedProblem& p, const VectorXd& lambda, const VectorXd& mu,
                      double rho)
      : p_(p), lambda_(lambda), mu_(mu), rho_(rho) {}

  double operator()(const VectorXd& x, VectorXd* grad, MatrixXd* hess) const {
    const bool want = grad != nullptr;
    VectorXd gf;
    MatrixXd hf, jc, jh;
    double value = p_.objective(x, want ? &gf : nullptr, hess ? &hf : nullptr);
    const VectorXd c = p_.equalities(x, want ? &jc : nullptr);
    const VectorXd h = p_.inequalities(x, want ? &jh : nullptr);
    const VectorXd y_eq = lambda_ + rho_ * c;
    VectorXd y_in = (mu_ + rho_ * h).cwiseMax(0.0);
    value += lambda_.dot(c) + 0.5 * rho_ * c.squaredNorm() +
             (y_in.squaredNorm() - mu_.squaredNorm()) / (2.0 * rho_);
    if (want) {
      *grad = gf;
      if (c.size()) *grad += jc.transpose() * y_eq;
      if (h.size()) *grad += jh.transpose() * y_in;
    }
    if (hess) {
      *hess = hf;
      p_.add_constraint_hessians(x, y_eq, y_in, *hess);
      if (c.size()) hess->noalias() += rho_ * jc.transpose() * jc;
      for (int i = 0; i < h.size(); ++i) {
        if (y_in(i) > 0.0) hess->noalias() += rho_ * jh.row(i).transpose() * jh.row(i);
      }
    }
    return value;
  }

 private:
  const ConstrainedProblem& p_;
  const VectorXd& lambda_;
  const VectorXd& mu_;
  double rho_;
};

// Cholesky of hess + shift*I with the smallest shift (from a geometric ladder) that works.
Eigen::LLT<MatrixXd> positive_definite_factor(const MatrixXd& hess) {
  const int n = static_cast<int>(hess.rows());
  const double scale = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
  double shift = 0.0;
  for (int attempt = 0; attempt < 60; ++attempt) {
    Eigen::LLT<MatrixXd> llt(hess + shift * MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) return llt;
    shift = shift == 0.0 ? 1e-10 * scale : 10.0 * shift;
  }
  return Eigen::LLT<MatrixXd>(scale * MatrixXd::Identity(n, n));
}

struct InnerResult {
  int iterations = 0;
  bool stalled = false;
};

InnerResult minimize_inner(const AugmentedLagrangian& fn, VectorXd& x, double tolerance,
                           int max_iterations, InnerMethod method) {
  InnerResult out;
  VectorXd g;
  MatrixXd h;
  double value = fn(x, &g, &h);
  MatrixXd b;
  if (method == InnerMethod::kBfgs) b = h;
  for (; out.iterations < max_iterations; ++out.iterations) {
    if (inf_norm(g) <= tolerance) return out;
    VectorXd p;
    if (method == InnerMethod::kNewton) {
      p = -positive_definite_factor(h).solve(g);
    } else {
      Eigen::LLT<MatrixXd> llt(b);
      if (llt.info() != Eigen::Success) {
        b = h;
        llt = positive_definite_factor(b);
      }
      p = -llt.solve(g);
    }
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      p = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    VectorXd trial;
    double trial_value = std::numeric_limits<double>::infinity();
    while (step > 1e-14) {
      trial = x + step * p;
      trial_value = fn(trial, nullptr, nullptr);
      if (std::isfinite(trial_value) && trial_value <= value + 1e-4 * step * slope) break;
      step *= 0.5;
    }
    if (!(step > 1e-14)) {
      out.stalled = true;
      return out;
    }
    VectorXd g_new;
    MatrixXd h_new;
    const double new_value =
        fn(trial, &g_new, method == InnerMethod::kNewton ? &h_new : nullptr);
    if (method == InnerMethod::kBfgs) {
      const VectorXd s = trial - x;
      const VectorXd y = g_new - g;
      const VectorXd bs = b * s;
      const double sbs = s.dot(bs);
      const double sy = s.dot(y);
      if (sbs > 0.0) {
        const double theta = sy >= 0.2 * sbs ? 1.0 : 0.8 * sbs / (sbs - sy);
        const VectorXd r = theta * y + (1.0 - theta) * bs;
        b += r * r.transpose() / s.dot(r) - bs * bs.transpose() / sbs;
      }
    } else {
      h = std::move(h_new);
    }
    x = std::move(trial);
    g = std::move(g_new);
    value = new_value;
  }
  return out;
}

}  // namespace

AugmentedLagrangianResult solve_augmented_lagrangian(const ConstrainedProblem& problem,
                                                     const VectorXd& x0,
                                                     const AugmentedLagrangianOptions& options) {
  AugmentedLagrangianResult res;
  res.x = x0;
  res.eq_multipliers = VectorXd::Zero(problem.equality_count());
  res.ineq_multipliers = VectorXd::Zero(problem.inequality_count());
  AugmentedLagrangianReport& rep = res.report;
  double rho = options.initial_penalty;
  double previous_violation = std::numeric_limits<double>::infinity();
  rep.termination = "outer iteration cap";

  for (rep.outer_iterations = 1; rep.outer_iterations <= options.max_outer_iterations;
       ++rep.outer_iterations) {
    VectorXd grad_f;
    problem.objective(res.x, &grad_f, nullptr);
    const double scale = 1.0 + inf_norm(grad_f);
    const AugmentedLagrangian fn(problem, res.eq_multipliers, res.ineq_multipliers, rho);
    const InnerResult inner =
        minimize_inner(fn, res.x, 0.1 * options.stationarity_tolerance * scale,
                       options.max_inner_iterations, options.inner_method);
    rep.inner_iterations += inner.iterations;

    MatrixXd jc, jh;
    rep.objective = problem.objective(res.x, &grad_f, nullptr);
    const VectorXd c = problem.equalities(res.x, &jc);
    const VectorXd h = problem.inequalities(res.x, &jh);
    const double violation =
        std::max(inf_norm(c), inf_norm(h.cwiseMax(-res.ineq_multipliers / rho)));
    res.eq_multipliers += rho * c;
    res.ineq_multipliers = (res.ineq_multipliers + rho * h).cwiseMax(0.0);

    VectorXd lagrangian_grad = grad_f;
    if (c.size()) lagrangian_grad += jc.transpose() * res.eq_multipliers;
    if (h.size()) lagrangian_grad += jh.transpose() * res.ineq_multipliers;
    rep.equality_residual = inf_norm(c);
    rep.inequality_residual = h.size() ? h.cwiseMax(0.0).maxCoeff() : 0.0;
    rep.stationarity = inf_norm(lagrangian_grad) / (1.0 + inf_norm(grad_f));
    rep.penalty = rho;

    if (rep.equality_residual <= options.constraint_tolerance &&
        rep.inequality_residual <= options.constraint_tolerance &&
        rep.stationarity <= options.stationarity_tolerance) {
      rep.converged = true;
      rep.termination = "tolerances met";
      return res;
    }
    if (violation > options.required_decrease * previous_violation) {
      if (rho >= options.max_penalty && inner.stalled) {
        rep.termination = "penalty cap reached with a stalled inner solve";
        return res;
      }
      rho = std::min(rho * options.penalty_growth, options.max_penalty);
    }
    previous_violation = violation;
  }
  rep.outer_iterations = options.max_outer_iterations;
  return res;
}

}  // namespace softarm
