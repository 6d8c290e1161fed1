#include "softarm/fields.hpp"

#include <algorithm>
#include <cmath>

#include "softarm/errors.hpp"
#include "softarm/planar.hpp"

namespace softarm {

ScalarField signed_curvature(const VectorField& q, const Grid& grid) {
  const VectorField qs = d1(q, grid);
  const VectorField qss = d2(q, grid);
  ScalarField k(grid.size());
  for (int i = 0; i < grid.size(); ++i) k(i) = cross2(qs.col(i), qss.col(i));
  return k;
}

ScalarField reaction_G(const VectorField& q, const ModelParams& params) {
  const VectorField qss = d2(q, params.grid);
  ScalarField g(params.grid.size());
  for (int i = 0; i < g.size(); ++i) {
    const double excess = qss.col(i).squaredNorm() - params.omega(i) * params.omega(i);
    g(i) = params.eps(i) + params.nu(i) * positive_part(excess);
  }
  return g;
}

ScalarField control_H(const VectorField& q, const ScalarField& u, const ModelParams& params) {
  if (u.size() != params.grid.size()) throw SizingError("control length does not match grid");
  const ScalarField kappa = signed_curvature(q, params.grid);
  return (params.mu.array() * (params.omega.array() * u.array() - kappa.array())).matrix();
}

double stretch_residual(const VectorField& q, const Grid& grid) {
  double worst = 0.0;
  for (int i = 0; i + 1 < q.cols(); ++i) {
    const double speed = (q.col(i + 1) - q.col(i)).norm() / grid.ds();
    worst = std::max(worst, std::abs(speed - 1.0));
  }
  return worst;
}

}  // namespace softarm
