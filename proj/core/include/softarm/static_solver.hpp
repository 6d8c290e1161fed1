#pragma once

#include <optional>
#include <string>
#include <vector>

#include "softarm/elastica.hpp"
#include "softarm/optimizer.hpp"
#include "softarm/params.hpp"
#include "softarm/types.hpp"

namespace softarm {

/// Static reachability data. `params` has mu already zeroed on the deactivated set.
class StaticProblem {
 public:
  StaticProblem(const ModelParams& params, ActuationMask mask, const Vec2& target,
                bool curvature_constraint = true);

  const ModelParams& params() const { return params_; }
  const Grid& grid() const { return params_.grid; }
  const ActuationMask& mask() const { return mask_; }
  const Vec2& target() const { return target_; }
  bool curvature_constraint() const { return curvature_constraint_; }

  /// mu omega / (mu + eps), zero on the deactivated set.
  const ScalarField& omega_bar() const { return omega_bar_; }
  const std::vector<bool>& deactivated() const { return deactivated_; }

 private:
  ModelParams params_;
  ActuationMask mask_;
  Vec2 target_;
  bool curvature_constraint_;
  ScalarField omega_bar_;
  std::vector<bool> deactivated_;
};

/// Unit-speed shape with q(0) = 0 and q_s(0) = (0, -1) solving theta_s = omegabar u.
/// Trapezoid rule for the angle, midpoint angle per link; links have length ds exactly.
VectorField integrate_shape(const ScalarField& u, const StaticProblem& problem);

struct StaticCost {
  double control = 0.0;
  double target = 0.0;
  double total() const { return control + target; }
};

/// (1/2) int_{[0,1] minus I} u^2 + |q(1) - q*|^2 / (2 tau), with q from integrate_shape.
StaticCost static_cost(const ScalarField& u, const StaticProblem& problem);

struct StaticReport {
  bool converged = false;
  std::string termination;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double equality_residual = 0.0;
  double inequality_residual = 0.0;
  double stationarity = 0.0;
  double stretch_residual = 0.0;
  double curvature_energy = 0.0;
  double control_energy = 0.0;
  double target_term = 0.0;
  double cost = 0.0;
  std::vector<std::string> warnings;
};

struct StaticSolution {
  ScalarField control;
  VectorField curve;
  /// Signed curvature with the clamp closure at s = 0 (see RodStencil).
  ScalarField kappa;
  StaticReport report;
};

struct StaticOptions {
  AugmentedLagrangianOptions solver;
};

/// Minimizes the elastica form of the static reachability problem over the curve and
/// recovers u = sign(kappa) |q_ss| / omegabar off the deactivated set.
StaticSolution solve_static_reachability(const StaticProblem& problem,
                                         const StaticOptions& options = {},
                                         const std::optional<VectorField>& initial = {});

/// Shared back end for reachability and grasping: solves the elastica program with the
/// given nodal penalty (and optional per-node inequality) and fills curve, curvature,
/// control and solver diagnostics.
StaticSolution solve_elastica(const StaticProblem& problem, const NodalPenalty& penalty,
                              const StaticOptions& options,
                              const std::optional<VectorField>& initial,
                              const NodalConstraint& constraint = {});

/// The straight rest shape q(s) = (0, -s).
VectorField rest_shape(const Grid& grid);

}  // namespace softarm
