#pragma once

#include "softarm/grid.hpp"
#include "softarm/params.hpp"
#include "softarm/types.hpp"

namespace softarm {

/// Nodal tangent q_s and curvature vector q_ss of a rod clamped at s = 0.
///
/// Node 0 uses the reflected ghost q_{-1} = q_1 - 2 ds t0, so the central tangent
/// equals the clamp direction t0 exactly. The free end uses q_{n} = 2 q_{n-1} - q_{n-2},
/// i.e. zero curvature at the tip. Interior nodes use second-order central differences.
class RodStencil {
 public:
  struct Geometry {
    VectorField tangent;
    VectorField curvature;
  };

  explicit RodStencil(const Grid& grid, const Vec2& clamp_tangent = Vec2(0.0, -1.0));

  const Grid& grid() const { return grid_; }
  const Vec2& clamp_tangent() const { return t0_; }

  Geometry evaluate(const VectorField& q) const;

  /// Linear part of evaluate (the clamp offset dropped): the directional derivative.
  Geometry linearize(const VectorField& dq) const;

  /// out += transpose of linearize applied to (tangent cotangent, curvature cotangent).
  void add_transpose(const VectorField& tangent_bar, const VectorField& curvature_bar,
                     VectorField& out) const;

  /// kappa_i = t_i × k_i.
  ScalarField signed_curvature(const VectorField& q) const;

 private:
  Grid grid_;
  Vec2 t0_;
};

/// Elastic potential of the controlled rod,
///   V(q; u) = sum_{i < n-1} w_i ds [ eps/2 |k|^2 + nu/4 (|k|^2 - omega^2)_+^2
///                                    + mu/2 (omega u - t × k)^2 ],
/// with (t, k) from RodStencil and trapezoid weights w_i. The tip node carries k = 0.
class RodPotential {
 public:
  struct Energy {
    double bending = 0.0;
    double curvature_penalty = 0.0;
    double control = 0.0;
    double total() const { return bending + curvature_penalty + control; }
  };

  explicit RodPotential(const ModelParams& params);

  const ModelParams& params() const { return params_; }
  const RodStencil& stencil() const { return stencil_; }

  Energy energy(const VectorField& q, const ScalarField& u) const;

  /// Gradient of V with respect to all nodal positions.
  VectorField gradient(const VectorField& q, const ScalarField& u) const;

  /// Hessian of V at q applied to the nodal direction p.
  VectorField hessian_product(const VectorField& q, const ScalarField& u,
                              const VectorField& p) const;

  /// dV/du_i.
  ScalarField control_gradient(const VectorField& q, const ScalarField& u) const;

  /// d/du_i <grad V, p>; the transpose of the control-to-force sensitivity up to sign.
  ScalarField mixed_product(const VectorField& q, const VectorField& p) const;

  /// Linearized reaction and control maps in direction p:
  ///   Gbar_i = 2 nu 1(|k|^2 - omega^2) k . dk,  Hbar_i = -mu (dt × k + t × dk).
  void linearized_maps(const VectorField& q, const VectorField& p, ScalarField& g_bar,
                       ScalarField& h_bar) const;

  /// Internal friction operator: gradient of (1/2) sum w ds gamma |k_lin(v)|^2.
  VectorField internal_friction(const VectorField& v) const;

 private:
  ModelParams params_;
  RodStencil stencil_;
};

}  // namespace softarm
