#pragma once

#include <Eigen/Core>

namespace softarm {

/// A point or direction in the plane, in manipulator-length units.
using Vec2 = Eigen::Vector2d;

/// One scalar per arclength node.
using ScalarField = Eigen::VectorXd;

/// One plane vector per arclength node; column i belongs to node i.
using VectorField = Eigen::Matrix2Xd;

}  // namespace softarm
