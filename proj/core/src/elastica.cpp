#include "softarm/elastica.hpp"

#include <string>

#include "softarm/errors.hpp"

namespace softarm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ElasticaProblem::ElasticaProblem(const Grid& grid, ScalarField omega_bar,
                                 std::vector<bool> deactivated, NodalPenalty penalty,
                                 bool curvature_constraint)
    : n_(grid.size()),
      grid_(grid),
      stencil_(grid),
      omega_bar_(std::move(omega_bar)),
      penalty_(std::move(penalty)),
      curvature_constraint_(curvature_constraint),
      rows_(grid.size()) {
  if (omega_bar_.size() != n_ || static_cast<int>(deactivated.size()) != n_) {
    throw SizingError("elastica data must match the grid");
  }
  for (int i = 0; i + 1 < n_; ++i) {
    if (deactivated[i]) {
      straight_.push_back(i);
    } else {
      if (!(omega_bar_(i) > 0.0)) {
        throw IllPosedProblem("effective curvature gain vanishes at active node " +
                              std::to_string(i));
      }
      active_.push_back(i);
    }
  }
  const double inv_ds2 = 1.0 / (grid.ds() * grid.ds());
  rows_[0] = {{0, -2.0 * inv_ds2}, {1, 2.0 * inv_ds2}};
  for (int i = 1; i + 1 < n_; ++i) {
    rows_[i] = {{i - 1, inv_ds2}, {i, -2.0 * inv_ds2}, {i + 1, inv_ds2}};
  }
}

VectorField ElasticaProblem::to_curve(const VectorXd& x) const {
  VectorField q = VectorField::Zero(2, n_);
  for (int j = 1; j < n_; ++j) q.col(j) = x.segment<2>(2 * (j - 1));
  return q;
}

VectorXd ElasticaProblem::from_curve(const VectorField& q) const {
  VectorXd x(dimension());
  for (int j = 1; j < n_; ++j) x.segment<2>(2 * (j - 1)) = q.col(j);
  return x;
}

Vec2 ElasticaProblem::curvature_at(const VectorField& q, int i) const {
  Vec2 k = Vec2::Zero();
  for (const auto& [j, a] : rows_[i]) k += a * q.col(j);
  if (i == 0) k -= 2.0 * stencil_.clamp_tangent() / grid_.ds();
  return k;
}

void ElasticaProblem::add_curvature_row(int i, const Vec2& coefficient,
                                        Eigen::Ref<VectorXd> row) const {
  for (const auto& [j, a] : rows_[i]) {
    if (j == 0) continue;
    row.segment<2>(2 * (j - 1)) += a * coefficient;
  }
}

void ElasticaProblem::add_curvature_outer(int i, double weight, MatrixXd& hess) const {
  for (const auto& [j, a] : rows_[i]) {
    if (j == 0) continue;
    for (const auto& [l, b] : rows_[i]) {
      if (l == 0) continue;
      hess(2 * (j - 1), 2 * (l - 1)) += weight * a * b;
      hess(2 * (j - 1) + 1, 2 * (l - 1) + 1) += weight * a * b;
    }
  }
}

double ElasticaProblem::curvature_energy(const VectorField& q) const {
  double acc = 0.0;
  for (int i : active_) {
    const double c = grid_.weight(i) * grid_.ds();
    acc += c * curvature_at(q, i).squaredNorm() / (2.0 * omega_bar_(i) * omega_bar_(i));
  }
  return acc;
}

double ElasticaProblem::objective(const VectorXd& x, VectorXd* grad, MatrixXd* hess) const {
  const VectorField q = to_curve(x);
  const int dim = dimension();
  if (grad) *grad = VectorXd::Zero(dim);
  if (hess) *hess = MatrixXd::Zero(dim, dim);
  double value = 0.0;
  for (int i : active_) {
    const double w = grid_.weight(i) * grid_.ds() / (omega_bar_(i) * omega_bar_(i));
    const Vec2 k = curvature_at(q, i);
    value += 0.5 * w * k.squaredNorm();
    if (grad) add_curvature_row(i, w * k, *grad);
    if (hess) add_curvature_outer(i, w, *hess);
  }
  if (penalty_) {
    VectorField pg;
    std::vector<Eigen::Matrix2d> ph;
    value += penalty_(q, grad ? &pg : nullptr, hess ? &ph : nullptr);
    for (int j = 1; j < n_; ++j) {
      if (grad) grad->segment<2>(2 * (j - 1)) += pg.col(j);
      if (hess) hess->block<2, 2>(2 * (j - 1), 2 * (j - 1)) += ph[j];
    }
  }
  return value;
}

VectorXd ElasticaProblem::equalities(const VectorXd& x, MatrixXd* jac) const {
  const VectorField q = to_curve(x);
  const double inv_ds2 = 1.0 / (grid_.ds() * grid_.ds());
  const int m = equality_count();
  VectorXd c(m);
  if (jac) *jac = MatrixXd::Zero(m, dimension());
  for (int j = 0; j + 1 < n_; ++j) {
    const Vec2 d = q.col(j + 1) - q.col(j);
    c(j) = d.squaredNorm() * inv_ds2 - 1.0;
    if (jac) {
      jac->row(j).segment<2>(2 * j) += 2.0 * inv_ds2 * d.transpose();
      if (j > 0) jac->row(j).segment<2>(2 * (j - 1)) -= 2.0 * inv_ds2 * d.transpose();
    }
  }
  int row = n_ - 1;
  for (int i : straight_) {
    const Vec2 k = curvature_at(q, i) * grid_.ds();
    for (int comp = 0; comp < 2; ++comp, ++row) {
      c(row) = k(comp);
      if (jac) {
        Vec2 e = Vec2::Zero();
        e(comp) = grid_.ds();
        VectorXd r = VectorXd::Zero(dimension());
        add_curvature_row(i, e, r);
        jac->row(row) = r.transpose();
      }
    }
  }
  return c;
}

VectorXd ElasticaProblem::inequalities(const VectorXd& x, MatrixXd* jac) const {
  const int m = inequality_count();
  VectorXd h(m);
  if (jac) *jac = MatrixXd::Zero(m, dimension());
  if (m == 0) return h;
  const VectorField q = to_curve(x);
  const int mc = curvature_count();
  for (int a = 0; a < mc; ++a) {
    const int i = active_[a];
    const double w = 1.0 / (omega_bar_(i) * omega_bar_(i));
    const Vec2 k = curvature_at(q, i);
    h(a) = w * k.squaredNorm() - 1.0;
    if (jac) {
      VectorXd r = VectorXd::Zero(dimension());
      add_curvature_row(i, 2.0 * w * k, r);
      jac->row(a) = r.transpose();
    }
  }
  for (int j = 1; j < m - mc + 1; ++j) {
    const NodalBound b = nodal_constraint_(q.col(j));
    h(mc + j - 1) = b.value;
    if (jac) jac->row(mc + j - 1).segment<2>(2 * (j - 1)) = b.gradient.transpose();
  }
  return h;
}

void ElasticaProblem::add_constraint_hessians(const VectorXd& x, const VectorXd& y_eq,
                                              const VectorXd& y_in, MatrixXd& hess) const {
  const double inv_ds2 = 1.0 / (grid_.ds() * grid_.ds());
  for (int j = 0; j + 1 < n_; ++j) {
    const double w = 2.0 * inv_ds2 * y_eq(j);
    const int hi = 2 * j;
    hess.block<2, 2>(hi, hi).diagonal().array() += w;
    if (j > 0) {
      const int lo = 2 * (j - 1);
      hess.block<2, 2>(lo, lo).diagonal().array() += w;
      hess.block<2, 2>(lo, hi).diagonal().array() -= w;
      hess.block<2, 2>(hi, lo).diagonal().array() -= w;
    }
  }
  const int mc = curvature_count();
  for (int a = 0; a < mc; ++a) {
    const int i = active_[a];
    add_curvature_outer(i, 2.0 * y_in(a) / (omega_bar_(i) * omega_bar_(i)), hess);
  }
  if (!nodal_constraint_) return;
  for (int j = 1; j < n_; ++j) {
    const double y = y_in(mc + j - 1);
    if (y == 0.0) continue;
    const Vec2 p = x.segment<2>(2 * (j - 1));
    hess.block<2, 2>(2 * (j - 1), 2 * (j - 1)) += y * nodal_constraint_(p).hessian;
  }
}

}  // namespace softarm
