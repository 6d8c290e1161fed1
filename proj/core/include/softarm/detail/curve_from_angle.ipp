#pragma once

#include <array>
#include <cmath>

namespace softarm {

template <typename AngleFn>
VectorField curve_from_angle(AngleFn&& theta, const Grid& grid) {
  // 5-point Gauss-Legendre on [-1, 1].
  static constexpr std::array<double, 5> kNodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                                   0.5384693101056831, 0.9061798459386640};
  static constexpr std::array<double, 5> kWeights = {0.2369268850561891, 0.4786286704993665,
                                                     0.5688888888888889, 0.4786286704993665,
                                                     0.2369268850561891};
  const int n = grid.size();
  const double h = grid.ds();
  VectorField q = VectorField::Zero(2, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double mid = grid.s(i) + 0.5 * h;
    Vec2 acc = Vec2::Zero();
    for (int k = 0; k < 5; ++k) {
      const double a = theta(mid + 0.5 * h * kNodes[k]);
      acc += kWeights[k] * Vec2(std::cos(a), std::sin(a));
    }
    q.col(i + 1) = q.col(i) + 0.5 * h * acc;
  }
  return q;
}

}  // namespace softarm
