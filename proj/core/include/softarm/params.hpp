#pragma once

#include <vector>

#include <Eigen/Core>

#include "softarm/grid.hpp"
#include "softarm/types.hpp"

namespace softarm {

/// Physical, penalty and friction profiles sampled on a grid.
///
///   rho   mass per unit length           (> 0)
///   omega maximal curvature, 1/length    (> 0)
///   eps   bending elastic constant       (> 0)
///   nu    curvature-constraint penalty   (>= 0)
///   mu    curvature-control penalty      (>= 0, zero on deactivated nodes)
///   beta  environmental friction         (>= 0)
///   gamma internal friction              (>= 0)
///   tau   target penalty weight          (> 0)
struct ModelParams {
  explicit ModelParams(const Grid& g);

  Grid grid;
  ScalarField rho;
  ScalarField omega;
  ScalarField eps;
  ScalarField nu;
  ScalarField mu;
  ScalarField beta;
  ScalarField gamma;
  double tau = 1.0;

  /// Throws ConfigError on size mismatch or sign violations.
  void validate() const;

  /// Effective stationary curvature gain mu*omega/(mu+eps).
  ScalarField omega_bar() const;
};

struct Interval {
  double lo;
  double hi;
};

/// The deactivated set I: arclength intervals, or everything except isolated points.
class ActuationMask {
 public:
  ActuationMask() = default;

  static ActuationMask from_intervals(std::vector<Interval> intervals);
  static ActuationMask all_except(std::vector<double> points);

  /// true at nodes inside I.
  std::vector<bool> nodes(const Grid& grid) const;
  bool empty() const { return !complement_ && intervals_.empty(); }

  bool is_complement() const { return complement_; }
  const std::vector<Interval>& intervals() const { return intervals_; }
  const std::vector<double>& points() const { return points_; }

 private:
  bool complement_ = false;
  std::vector<Interval> intervals_;
  std::vector<double> points_;
};

/// Returns a copy of `params` with mu zeroed on the nodes of I.
ModelParams deactivate(const ModelParams& params, const ActuationMask& mask);

/// Nodal control clipped to [-1, 1] and zeroed on deactivated nodes.
ScalarField admissible_control(const ScalarField& u, const std::vector<bool>& deactivated);

/// Curvature control over space and time: column k holds the nodal control
/// applied on the macro time interval [t_k, t_{k+1}).
struct SpaceTimeControl {
  Eigen::MatrixXd values;

  static SpaceTimeControl constant(const ScalarField& u, int n_steps);
  int n_steps() const { return static_cast<int>(values.cols()); }
  int n_nodes() const { return static_cast<int>(values.rows()); }
  Eigen::VectorXd at(int k) const { return values.col(k); }
};

}  // namespace softarm
