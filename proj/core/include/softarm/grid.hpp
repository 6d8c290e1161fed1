#pragma once

#include <span>
#include <vector>

#include "softarm/types.hpp"

namespace softarm {

/// Uniform arclength grid on [0, 1]; the manipulator has unit length.
class Grid {
 public:
  explicit Grid(int n_nodes);

  /// Grid whose spacing is `ds`; 1/ds must be (close to) an integer.
  static Grid from_spacing(double ds);

  int size() const { return n_; }
  double ds() const { return ds_; }

  /// Node coordinate; s(0) == 0 and s(size()-1) == 1 exactly.
  double s(int i) const { return static_cast<double>(i) / static_cast<double>(n_ - 1); }
  ScalarField coordinates() const;

  /// Composite trapezoid weight of node i (multiply by ds()).
  double weight(int i) const { return (i == 0 || i == n_ - 1) ? 0.5 : 1.0; }

  /// Trapezoid rule of a nodal field.
  double integrate(const ScalarField& f) const;

  /// Nearest node to arclength s, ties rounded away from the anchor.
  int nearest_node(double s) const;

 private:
  int n_;
  double ds_;
};

/// Finite-difference weights for the `order`-th derivative at offset 0 on the
/// given stencil offsets (in units of the grid spacing). Fornberg's recursion.
std::vector<double> fd_weights(int order, std::span<const double> offsets);

/// Spatial derivatives of nodal fields. Second-order central differences in the
/// interior and second-order one-sided stencils where the central one does not fit.
/// The derivative of order k needs at least k + 2 nodes.
ScalarField d1(const ScalarField& f, const Grid& grid);
ScalarField d2(const ScalarField& f, const Grid& grid);
ScalarField d3(const ScalarField& f, const Grid& grid);
ScalarField d4(const ScalarField& f, const Grid& grid);
VectorField d1(const VectorField& f, const Grid& grid);
VectorField d2(const VectorField& f, const Grid& grid);
VectorField d3(const VectorField& f, const Grid& grid);
VectorField d4(const VectorField& f, const Grid& grid);

}  // namespace softarm
