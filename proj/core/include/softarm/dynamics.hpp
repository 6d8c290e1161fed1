#pragma once

#include <vector>

#include <Eigen/Core>

#include "softarm/params.hpp"
#include "softarm/rod.hpp"
#include "softarm/types.hpp"

namespace softarm {

struct TimeGrid {
  double dt = 1e-3;
  int n_steps = 0;
  double final_time() const { return dt * n_steps; }
};

/// Positions, velocities and nodal tension of the rod at one instant.
struct RodState {
  VectorField q;
  VectorField v;
  ScalarField sigma;
};

struct DynamicsOptions {
  /// Verlet substeps per macro step; 0 picks the count from the stability estimate.
  /// A fixed count that violates the estimate (at safety 1) aborts the run.
  int substeps = 0;
  /// Fraction of the explicit stability limit 2 / omega_max used for automatic substeps.
  double safety = 0.5;
  /// Runs whose nodes leave this radius around the clamp are reported as unstable.
  double position_bound = 10.0;
};

/// Result of one acceleration evaluation.
struct Acceleration {
  VectorField a;
  VectorField force;
  /// One multiplier per link for the constraint |q_{j+1} - q_j|^2 = ds^2.
  Eigen::VectorXd lambda;
};

/// Lumped-mass model of the controlled inextensible rod.
///
/// Nodal masses rho_i w_i ds (trapezoid weights), node 0 clamped. The elastic force is
/// -grad V of RodPotential, friction is -beta w ds v - K_gamma v, and the inextensibility
/// multipliers come from the twice-differentiated link constraints (a tridiagonal solve).
class RodModel {
 public:
  explicit RodModel(const ModelParams& params);

  const ModelParams& params() const { return potential_.params(); }
  const Grid& grid() const { return potential_.params().grid; }
  const RodPotential& potential() const { return potential_; }
  const ScalarField& masses() const { return mass_; }
  /// Inverse nodal masses with 0 at the clamp.
  const ScalarField& inverse_masses() const { return inv_mass_; }

  /// Conservative and friction forces (no tension) on every node.
  VectorField applied_forces(const VectorField& q, const VectorField& v,
                             const ScalarField& u) const;
  VectorField friction(const VectorField& v) const;

  /// Constrained acceleration; `external` adds nodal forces (already integrated over cells).
  Acceleration acceleration(const VectorField& q, const VectorField& v, const ScalarField& u,
                            const VectorField* external = nullptr) const;

  /// Transpose of the acceleration map at (q, v, u) applied to a_bar, accumulated into
  /// q_bar, v_bar and u_bar. `fwd` is the forward evaluation at the same point.
  /// `zeta` receives the adjoint link multipliers when non-null.
  void acceleration_transpose(const VectorField& q, const VectorField& v, const ScalarField& u,
                              const Acceleration& fwd, const VectorField& a_bar,
                              VectorField& q_bar, VectorField& v_bar, ScalarField& u_bar,
                              Eigen::VectorXd* zeta = nullptr) const;

  /// Link multipliers to nodal tension: sigma_{j+1/2} = -2 ds lambda_j at link midpoints,
  /// averaged to interior nodes and linearly extrapolated to the ends.
  ScalarField nodal_tension(const Eigen::VectorXd& lambda) const;
  Eigen::VectorXd link_tension(const Eigen::VectorXd& lambda) const;

  /// Verlet step safety * 2 / omega_max, with omega_max estimated at `state` from the
  /// bending, curvature-penalty and control stiffness, the tension stiffness and friction.
  double stable_step(const RodState& state, double safety) const;

  /// Kinetic energy sum m_i |v_i|^2 / 2.
  double kinetic_energy(const VectorField& v) const;

 private:
  RodPotential potential_;
  ScalarField mass_;
  ScalarField inv_mass_;
  ScalarField beta_weight_;
};

/// Link constraint algebra shared by the stepper and its transpose.
namespace links {

/// (C w)_j = 2 d_j . (w_{j+1} - w_j), d_j = q_{j+1} - q_j.
Eigen::VectorXd apply(const VectorField& q, const VectorField& w);
/// C^T lambda.
VectorField apply_transpose(const VectorField& q, const Eigen::VectorXd& lambda);
/// Gradient in q of zeta^T C(q) w, i.e. node j+1 gets 2 zeta_j (w_{j+1} - w_j), node j the negative.
VectorField curvature_term(const VectorField& w, const Eigen::VectorXd& zeta);
/// Solves (C M^{-1} C^T) x = rhs. Throws SingularSystem if a link degenerates.
Eigen::VectorXd solve_schur(const VectorField& q, const ScalarField& inv_mass,
                            const Eigen::VectorXd& rhs);

}  // namespace links

/// Forward evaluations kept for one Verlet substep (used by the discrete adjoint).
struct SubstepTape {
  VectorField q;
  VectorField v;
  Acceleration start;
  VectorField v_half;
  VectorField q_drift;
  Acceleration end;
  VectorField v_end;
  VectorField q_out;
  Eigen::VectorXd projection;
  VectorField v_out;
};

/// One velocity-Verlet substep of size h followed by link renormalization from the
/// clamp and projection of the velocity onto the constraint tangent space.
RodState verlet_substep(const RodModel& model, const VectorField& q, const VectorField& v,
                        const ScalarField& u, double h, SubstepTape* tape = nullptr);

/// Transpose of verlet_substep: given cotangents of (q_out, v_out), accumulates those of
/// (q, v) and u. `zeta` receives the adjoint link multipliers at the substep start.
void verlet_substep_transpose(const RodModel& model, const SubstepTape& tape, const ScalarField& u,
                              double h, const VectorField& q_out_bar, const VectorField& v_out_bar,
                              VectorField& q_bar, VectorField& v_bar, ScalarField& u_bar,
                              Eigen::VectorXd* zeta = nullptr);

/// Force densities (per unit length) of tension, bending, curvature penalty and control,
/// for a prescribed nodal tension. The clamp node carries the anchor reaction and is zero.
VectorField internal_forces(const VectorField& q, const ScalarField& sigma, const ScalarField& u,
                            const ModelParams& params);

/// Nodal tension making the link constraints hold to second order in time under the
/// equations of motion, given an optional external force density.
ScalarField solve_tension(const VectorField& q, const VectorField& v, const ScalarField& u,
                          const ModelParams& params, const VectorField* external_density = nullptr);

/// Substep count for a macro step dt starting at `state`.
int substeps_for(const RodModel& model, const RodState& state, double dt,
                 const DynamicsOptions& options);

/// Advances one macro step with the control held fixed.
RodState step(const RodModel& model, const RodState& state, const ScalarField& u, double dt,
              int substeps);

struct ForwardRun {
  TimeGrid time;
  /// Verlet substeps used in each macro step.
  std::vector<int> substeps;
  /// states[k] is the state at t_k = k dt, k = 0..n_steps.
  std::vector<RodState> states;
  SpaceTimeControl control;
  /// max_j | |q_{j+1} - q_j| / ds - 1 | per stored step.
  std::vector<double> stretch;
  std::vector<double> kinetic;
  std::vector<double> potential;
};

/// Rest state q = (0, -s), v = 0 with its tension.
RodState rest_state(const Grid& grid);

/// Integrates from `initial` with column k of `control` on [t_k, t_{k+1}).
/// Throws NumericalInstability with the macro-step index on blow-up.
ForwardRun simulate(const RodModel& model, const RodState& initial,
                    const SpaceTimeControl& control, const TimeGrid& time,
                    const DynamicsOptions& options = {});

}  // namespace softarm
