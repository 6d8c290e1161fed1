#pragma once

#include "softarm/grid.hpp"
#include "softarm/params.hpp"
#include "softarm/types.hpp"

namespace softarm {

/// kappa = q_s × q_ss with the generic d1/d2 stencils (one-sided at the ends).
ScalarField signed_curvature(const VectorField& q, const Grid& grid);

/// G = eps + nu (|q_ss|^2 - omega^2)_+   (bending moment and curvature constraint).
ScalarField reaction_G(const VectorField& q, const ModelParams& params);

/// H = mu (omega u - q_s × q_ss)   (curvature control).
ScalarField control_H(const VectorField& q, const ScalarField& u, const ModelParams& params);

/// Inextensibility residual max_i | |q_{i+1} - q_i| / ds - 1 |.
double stretch_residual(const VectorField& q, const Grid& grid);

/// Unit-speed curve sampled from a tangent-angle function at the grid nodes,
/// exact positions (Gauss-Legendre per cell). Used for oracles and fixtures.
template <typename AngleFn>
VectorField curve_from_angle(AngleFn&& theta, const Grid& grid);

}  // namespace softarm

#include "softarm/detail/curve_from_angle.ipp"
