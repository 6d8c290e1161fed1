#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "softarm/optimizer.hpp"
#include "softarm/rod.hpp"

namespace softarm {

/// A penalty that is a sum of single-node terms. Returns the value and, when the
/// pointers are non-null, the nodal gradient and per-node 2x2 Hessian blocks.
using NodalPenalty = std::function<double(const VectorField& q, VectorField* grad,
                                          std::vector<Eigen::Matrix2d>* hess)>;

/// A constraint g(q_i) <= 0 imposed at every free node, with its value, gradient and Hessian.
struct NodalBound {
  double value = 0.0;
  Vec2 gradient = Vec2::Zero();
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};
using NodalConstraint = std::function<NodalBound(const Vec2& p)>;

/// Discrete elastica problem in the nodal positions q_1..q_{n-1} (q_0 is the clamp):
///
///   min  sum_{i active} w_i ds |k_i|^2 / (2 omegabar_i^2) + P(q)
///   s.t. |q_{j+1} - q_j|^2 / ds^2 - 1 = 0     for every link
///        ds k_i = 0                          for i in the deactivated set
///        |k_i|^2 / omegabar_i^2 - 1 <= 0      for i active (optional)
///        g(q_i) <= 0                         for i = 1..n-1 (optional)
///
/// Active nodes are those below the tip outside the deactivated set.
class ElasticaProblem : public ConstrainedProblem {
 public:
  ElasticaProblem(const Grid& grid, ScalarField omega_bar, std::vector<bool> deactivated,
                  NodalPenalty penalty, bool curvature_constraint);

  int dimension() const override { return 2 * (n_ - 1); }
  int equality_count() const override {
    return (n_ - 1) + 2 * static_cast<int>(straight_.size());
  }
  int inequality_count() const override {
    return curvature_count() + (nodal_constraint_ ? n_ - 1 : 0);
  }

  void set_nodal_constraint(NodalConstraint constraint) {
    nodal_constraint_ = std::move(constraint);
  }

  double objective(const Eigen::VectorXd& x, Eigen::VectorXd* grad,
                   Eigen::MatrixXd* hess) const override;
  Eigen::VectorXd equalities(const Eigen::VectorXd& x, Eigen::MatrixXd* jac) const override;
  Eigen::VectorXd inequalities(const Eigen::VectorXd& x, Eigen::MatrixXd* jac) const override;
  void add_constraint_hessians(const Eigen::VectorXd& x, const Eigen::VectorXd& y_eq,
                               const Eigen::VectorXd& y_in, Eigen::MatrixXd& hess) const override;

  VectorField to_curve(const Eigen::VectorXd& x) const;
  Eigen::VectorXd from_curve(const VectorField& q) const;

  /// sum over active nodes of w_i ds |k_i|^2 / (2 omegabar_i^2).
  double curvature_energy(const VectorField& q) const;

  const std::vector<int>& active_nodes() const { return active_; }
  const RodStencil& stencil() const { return stencil_; }

 private:
  int curvature_count() const {
    return curvature_constraint_ ? static_cast<int>(active_.size()) : 0;
  }
  Vec2 curvature_at(const VectorField& q, int i) const;
  // Adds coefficient * (row i of the curvature map, per component) into a dense gradient row.
  void add_curvature_row(int i, const Vec2& coefficient, Eigen::Ref<Eigen::VectorXd> row) const;
  void add_curvature_outer(int i, double weight, Eigen::MatrixXd& hess) const;

  int n_;
  Grid grid_;
  RodStencil stencil_;
  ScalarField omega_bar_;
  std::vector<int> active_;
  std::vector<int> straight_;
  NodalPenalty penalty_;
  bool curvature_constraint_;
  NodalConstraint nodal_constraint_;
  // Curvature map k_i = sum_j coeff * q_j (+ clamp offset at node 0), as (node, coeff) lists.
  std::vector<std::vector<std::pair<int, double>>> rows_;
};

}  // namespace softarm
