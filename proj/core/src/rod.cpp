#include "softarm/rod.hpp"

#include <string>

#include "softarm/errors.hpp"
#include "softarm/planar.hpp"

namespace softarm {

RodStencil::RodStencil(const Grid& grid, const Vec2& clamp_tangent)
    : grid_(grid), t0_(clamp_tangent) {
  if (grid.size() < 3) {
    throw SizingError("rod stencils need at least 3 nodes, got " + std::to_string(grid.size()));
  }
}

namespace {

void check_nodes(const VectorField& f, const Grid& grid) {
  if (f.cols() != grid.size()) throw SizingError("nodal field length does not match grid");
}

}  // namespace

RodStencil::Geometry RodStencil::evaluate(const VectorField& q) const {
  Geometry g = linearize(q);
  const double ds = grid_.ds();
  g.tangent.col(0) = t0_;
  g.curvature.col(0) -= 2.0 * t0_ / ds;
  return g;
}

RodStencil::Geometry RodStencil::linearize(const VectorField& dq) const {
  check_nodes(dq, grid_);
  const int n = grid_.size();
  const double ds = grid_.ds();
  const double inv_ds2 = 1.0 / (ds * ds);
  Geometry g{VectorField::Zero(2, n), VectorField::Zero(2, n)};
  g.curvature.col(0) = 2.0 * (dq.col(1) - dq.col(0)) * inv_ds2;
  for (int i = 1; i + 1 < n; ++i) {
    g.tangent.col(i) = (dq.col(i + 1) - dq.col(i - 1)) / (2.0 * ds);
    g.curvature.col(i) = (dq.col(i + 1) - 2.0 * dq.col(i) + dq.col(i - 1)) * inv_ds2;
  }
  g.tangent.col(n - 1) = (dq.col(n - 1) - dq.col(n - 2)) / ds;
  return g;
}

void RodStencil::add_transpose(const VectorField& tangent_bar, const VectorField& curvature_bar,
                               VectorField& out) const {
  check_nodes(tangent_bar, grid_);
  check_nodes(curvature_bar, grid_);
  check_nodes(out, grid_);
  const int n = grid_.size();
  const double ds = grid_.ds();
  const double inv_ds2 = 1.0 / (ds * ds);
  const Vec2 k0 = 2.0 * curvature_bar.col(0) * inv_ds2;
  out.col(1) += k0;
  out.col(0) -= k0;
  for (int i = 1; i + 1 < n; ++i) {
    const Vec2 tb = tangent_bar.col(i) / (2.0 * ds);
    out.col(i + 1) += tb;
    out.col(i - 1) -= tb;
    const Vec2 kb = curvature_bar.col(i) * inv_ds2;
    out.col(i + 1) += kb;
    out.col(i) -= 2.0 * kb;
    out.col(i - 1) += kb;
  }
  const Vec2 tip = tangent_bar.col(n - 1) / ds;
  out.col(n - 1) += tip;
  out.col(n - 2) -= tip;
}

ScalarField RodStencil::signed_curvature(const VectorField& q) const {
  const Geometry g = evaluate(q);
  ScalarField kappa(grid_.size());
  for (int i = 0; i < grid_.size(); ++i) kappa(i) = cross2(g.tangent.col(i), g.curvature.col(i));
  return kappa;
}

RodPotential::RodPotential(const ModelParams& params)
    : params_(params), stencil_(params.grid) {
  params_.validate();
}

RodPotential::Energy RodPotential::energy(const VectorField& q, const ScalarField& u) const {
  const RodStencil::Geometry g = stencil_.evaluate(q);
  const Grid& grid = params_.grid;
  Energy e;
  for (int i = 0; i + 1 < grid.size(); ++i) {
    const double c = grid.weight(i) * grid.ds();
    const Vec2 k = g.curvature.col(i);
    const double k2 = k.squaredNorm();
    const double excess = positive_part(k2 - params_.omega(i) * params_.omega(i));
    const double mismatch = params_.omega(i) * u(i) - cross2(g.tangent.col(i), k);
    e.bending += c * 0.5 * params_.eps(i) * k2;
    e.curvature_penalty += c * 0.25 * params_.nu(i) * excess * excess;
    e.control += c * 0.5 * params_.mu(i) * mismatch * mismatch;
  }
  return e;
}

VectorField RodPotential::gradient(const VectorField& q, const ScalarField& u) const {
  const RodStencil::Geometry g = stencil_.evaluate(q);
  const Grid& grid = params_.grid;
  const int n = grid.size();
  VectorField gt = VectorField::Zero(2, n);
  VectorField gk = VectorField::Zero(2, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double c = grid.weight(i) * grid.ds();
    const Vec2 t = g.tangent.col(i);
    const Vec2 k = g.curvature.col(i);
    const double G =
        params_.eps(i) +
        params_.nu(i) * positive_part(k.squaredNorm() - params_.omega(i) * params_.omega(i));
    const double H = params_.mu(i) * (params_.omega(i) * u(i) - cross2(t, k));
    gk.col(i) = c * (G * k + H * perp(t));
    gt.col(i) = -c * H * perp(k);
  }
  VectorField out = VectorField::Zero(2, n);
  stencil_.add_transpose(gt, gk, out);
  return out;
}

VectorField RodPotential::hessian_product(const VectorField& q, const ScalarField& u,
                                          const VectorField& p) const {
  const RodStencil::Geometry g = stencil_.evaluate(q);
  const RodStencil::Geometry d = stencil_.linearize(p);
  const Grid& grid = params_.grid;
  const int n = grid.size();
  VectorField gt = VectorField::Zero(2, n);
  VectorField gk = VectorField::Zero(2, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double c = grid.weight(i) * grid.ds();
    const Vec2 t = g.tangent.col(i);
    const Vec2 k = g.curvature.col(i);
    const Vec2 tb = d.tangent.col(i);
    const Vec2 kb = d.curvature.col(i);
    const double excess = k.squaredNorm() - params_.omega(i) * params_.omega(i);
    const double G = params_.eps(i) + params_.nu(i) * positive_part(excess);
    const double G_bar = excess > 0.0 ? 2.0 * params_.nu(i) * k.dot(kb) : 0.0;
    const double H = params_.mu(i) * (params_.omega(i) * u(i) - cross2(t, k));
    const double H_bar = -params_.mu(i) * (cross2(tb, k) + cross2(t, kb));
    gk.col(i) = c * (G * kb + G_bar * k + H_bar * perp(t) + H * perp(tb));
    gt.col(i) = -c * (H_bar * perp(k) + H * perp(kb));
  }
  VectorField out = VectorField::Zero(2, n);
  stencil_.add_transpose(gt, gk, out);
  return out;
}

ScalarField RodPotential::control_gradient(const VectorField& q, const ScalarField& u) const {
  const RodStencil::Geometry g = stencil_.evaluate(q);
  const Grid& grid = params_.grid;
  ScalarField out = ScalarField::Zero(grid.size());
  for (int i = 0; i + 1 < grid.size(); ++i) {
    const double c = grid.weight(i) * grid.ds();
    const double H =
        params_.mu(i) * (params_.omega(i) * u(i) - cross2(g.tangent.col(i), g.curvature.col(i)));
    out(i) = c * params_.omega(i) * H;
  }
  return out;
}

ScalarField RodPotential::mixed_product(const VectorField& q, const VectorField& p) const {
  ScalarField g_bar, h_bar;
  linearized_maps(q, p, g_bar, h_bar);
  const Grid& grid = params_.grid;
  ScalarField out = ScalarField::Zero(grid.size());
  for (int i = 0; i + 1 < grid.size(); ++i) {
    out(i) = grid.weight(i) * grid.ds() * params_.omega(i) * h_bar(i);
  }
  return out;
}

void RodPotential::linearized_maps(const VectorField& q, const VectorField& p, ScalarField& g_bar,
                                   ScalarField& h_bar) const {
  const RodStencil::Geometry g = stencil_.evaluate(q);
  const RodStencil::Geometry d = stencil_.linearize(p);
  const int n = params_.grid.size();
  g_bar = ScalarField::Zero(n);
  h_bar = ScalarField::Zero(n);
  for (int i = 0; i + 1 < n; ++i) {
    const Vec2 t = g.tangent.col(i);
    const Vec2 k = g.curvature.col(i);
    const Vec2 kb = d.curvature.col(i);
    const double excess = k.squaredNorm() - params_.omega(i) * params_.omega(i);
    g_bar(i) = 2.0 * params_.nu(i) * heaviside(excess) * k.dot(kb);
    h_bar(i) = -params_.mu(i) * (cross2(d.tangent.col(i), k) + cross2(t, kb));
  }
}

VectorField RodPotential::internal_friction(const VectorField& v) const {
  const Grid& grid = params_.grid;
  const int n = grid.size();
  const RodStencil::Geometry d = stencil_.linearize(v);
  VectorField gk = VectorField::Zero(2, n);
  for (int i = 0; i + 1 < n; ++i) {
    gk.col(i) = grid.weight(i) * grid.ds() * params_.gamma(i) * d.curvature.col(i);
  }
  VectorField out = VectorField::Zero(2, n);
  stencil_.add_transpose(VectorField::Zero(2, n), gk, out);
  return out;
}

}  // namespace softarm
