#include "softarm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "softarm/errors.hpp"

namespace softarm {

Grid::Grid(int n_nodes) : n_(n_nodes), ds_(0.0) {
  if (n_nodes < 2) {
    throw SizingError("grid needs at least 2 nodes, got " + std::to_string(n_nodes));
  }
  ds_ = 1.0 / static_cast<double>(n_nodes - 1);
}

Grid Grid::from_spacing(double ds) {
  if (!(ds > 0.0) || ds > 1.0) {
    throw SizingError("grid spacing must lie in (0, 1]");
  }
  const double cells = 1.0 / ds;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * rounded) {
    throw SizingError("1/ds must be an integer number of cells");
  }
  return Grid(static_cast<int>(rounded) + 1);
}

ScalarField Grid::coordinates() const {
  ScalarField out(n_);
  for (int i = 0; i < n_; ++i) out(i) = s(i);
  return out;
}

double Grid::integrate(const ScalarField& f) const {
  if (f.size() != n_) throw SizingError("field length does not match grid");
  double acc = 0.0;
  for (int i = 0; i < n_; ++i) acc += weight(i) * f(i);
  return acc * ds_;
}

int Grid::nearest_node(double s) const {
  const double x = std::clamp(s, 0.0, 1.0) * static_cast<double>(n_ - 1);
  return static_cast<int>(std::lround(x));
}

std::vector<double> fd_weights(int order, std::span<const double> offsets) {
  const int m = static_cast<int>(offsets.size());
  if (order < 0 || m <= order) throw SizingError("stencil too small for derivative order");
  // c[j][k]: weight of node j for the k-th derivative.
  std::vector<std::vector<double>> c(m, std::vector<double>(order + 1, 0.0));
  double c1 = 1.0;
  double c4 = offsets[0];
  c[0][0] = 1.0;
  for (int i = 1; i < m; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = offsets[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = offsets[i] - offsets[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(m);
  for (int j = 0; j < m; ++j) w[j] = c[j][order];
  return w;
}

namespace {

// Stencil for derivative `order` at node i: central (half-width `half`) when it
// fits, else a one-sided window of order+2 nodes. Both are second-order accurate.
struct Stencil {
  int first;
  std::vector<double> weights;
};

class StencilTable {
 public:
  StencilTable(int order, int n) : stencils_(n) {
    const int half = (order + 1) / 2;  // d1,d2 -> 1; d3,d4 -> 2
    const int one_sided = order + 2;
    if (n < one_sided) {
      throw SizingError("grid with " + std::to_string(n) + " nodes is too small for d" +
                        std::to_string(order) + " (needs " + std::to_string(one_sided) + ")");
    }
    for (int i = 0; i < n; ++i) {
      int first, width;
      if (i - half >= 0 && i + half < n) {
        first = i - half;
        width = 2 * half + 1;
      } else {
        width = one_sided;
        first = (i - half < 0) ? 0 : n - width;
      }
      std::vector<double> offsets(width);
      for (int j = 0; j < width; ++j) offsets[j] = static_cast<double>(first + j - i);
      stencils_[i] = {first, fd_weights(order, offsets)};
    }
  }
  const Stencil& operator[](int i) const { return stencils_[i]; }

 private:
  std::vector<Stencil> stencils_;
};

template <typename Field>
Field apply_derivative(const Field& f, const Grid& grid, int order) {
  const int n = grid.size();
  const auto nodes = (Field::RowsAtCompileTime == 2) ? f.cols() : f.size();
  if (nodes != n) throw SizingError("field length does not match grid");
  const StencilTable table(order, n);
  const double scale = std::pow(grid.ds(), -order);
  Field out = Field::Zero(f.rows(), f.cols());
  for (int i = 0; i < n; ++i) {
    const Stencil& st = table[i];
    for (std::size_t j = 0; j < st.weights.size(); ++j) {
      const int node = st.first + static_cast<int>(j);
      if constexpr (Field::RowsAtCompileTime == 2) {
        out.col(i) += st.weights[j] * f.col(node);
      } else {
        out(i) += st.weights[j] * f(node);
      }
    }
    if constexpr (Field::RowsAtCompileTime == 2) {
      out.col(i) *= scale;
    } else {
      out(i) *= scale;
    }
  }
  return out;
}

}  // namespace

ScalarField d1(const ScalarField& f, const Grid& g) { return apply_derivative(f, g, 1); }
ScalarField d2(const ScalarField& f, const Grid& g) { return apply_derivative(f, g, 2); }
ScalarField d3(const ScalarField& f, const Grid& g) { return apply_derivative(f, g, 3); }
ScalarField d4(const ScalarField& f, const Grid& g) { return apply_derivative(f, g, 4); }
VectorField d1(const VectorField& f, const Grid& g) { return apply_derivative(f, g, 1); }
VectorField d2(const VectorField& f, const Grid& g) { return apply_derivative(f, g, 2); }
VectorField d3(const VectorField& f, const Grid& g) { return apply_derivative(f, g, 3); }
VectorField d4(const VectorField& f, const Grid& g) { return apply_derivative(f, g, 4); }

}  // namespace softarm
