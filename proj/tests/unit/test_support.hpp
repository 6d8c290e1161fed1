#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "softarm/params.hpp"
#include "softarm/types.hpp"

namespace softarm::testing {

/// The global parameter profiles, written out by hand.
inline ModelParams arm_params(const Grid& grid) {
  ModelParams p(grid);
  for (int i = 0; i < grid.size(); ++i) {
    const double s = grid.s(i);
    p.eps(i) = 0.1 * (1.0 - 0.9 * s);
    p.mu(i) = s < 1.0 ? (1.0 - s) * std::exp(-0.1 * s * s / (1.0 - s * s)) : 0.0;
    p.omega(i) = 4.0 * std::numbers::pi * (1.0 + s * s);
    p.rho(i) = std::exp(-s);
    p.nu(i) = 1e-3 * (1.0 - 0.09 * s);
    p.beta(i) = 2.0 - s;
    p.gamma(i) = 1e-6 * (2.0 - s);
  }
  p.tau = 1e-4;
  return p;
}

/// Unit-link chain hanging from the origin with tangent angle theta (measured from (0, -1)).
template <typename Angle>
VectorField chain_from_angle(Angle&& theta, const Grid& grid) {
  VectorField q = VectorField::Zero(2, grid.size());
  for (int i = 0; i + 1 < grid.size(); ++i) {
    const double a = theta(0.5 * (grid.s(i) + grid.s(i + 1)));
    q.col(i + 1) = q.col(i) + grid.ds() * Vec2(std::sin(a), -std::cos(a));
  }
  return q;
}

inline VectorField random_field(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  VectorField f(2, n);
  for (int i = 0; i < n; ++i) f.col(i) = Vec2(normal(rng), normal(rng));
  return f;
}

}  // namespace softarm::testing
