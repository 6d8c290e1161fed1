#include "softarm/discrete_model.hpp"

#include <cmath>

#include "softarm/errors.hpp"
#include "softarm/planar.hpp"

namespace softarm {

LinkChain LinkChain::from_params(const ModelParams& params, const VectorField& joints,
                                 const ScalarField& control) {
  const int n = params.grid.size();
  if (joints.cols() != n || control.size() != n) {
    throw SizingError("chain joints and controls must match the profile grid");
  }
  LinkChain c;
  c.joints = joints;
  c.link_length = params.grid.ds();
  c.mass = params.rho * c.link_length;
  c.angle_bound = params.omega * c.link_length;
  c.nu = params.nu;
  c.mu = params.mu;
  c.eps = params.eps;
  c.control = control;
  return c;
}

Vec2 LinkChain::joint(int k) const {
  const int n = links();
  if (k == -1) return joints.col(0) + link_length * Vec2(0.0, 1.0);
  if (k == n + 1) return 2.0 * joints.col(n) - joints.col(n - 1);
  return joints.col(k);
}

double potential_F(const LinkChain& chain, const ScalarField& link_sigma) {
  const int n = chain.links();
  if (link_sigma.size() != n) throw SizingError("expected one multiplier per link");
  const double l2 = chain.link_length * chain.link_length;
  double acc = 0.0;
  for (int k = 1; k <= n; ++k) {
    acc += link_sigma(k - 1) * ((chain.joint(k) - chain.joint(k - 1)).squaredNorm() - l2);
  }
  return acc;
}

double potential_G(const LinkChain& chain) {
  const double l2 = chain.link_length * chain.link_length;
  double acc = 0.0;
  for (int k = 0; k <= chain.links(); ++k) {
    const Vec2 ahead = chain.joint(k + 1) - chain.joint(k);
    const Vec2 behind = chain.joint(k) - chain.joint(k - 1);
    const double gap = positive_part(std::cos(chain.angle_bound(k)) - ahead.dot(behind) / l2);
    acc += chain.nu(k) * gap * gap;
  }
  return acc;
}

double potential_B(const LinkChain& chain) {
  double acc = 0.0;
  for (int k = 0; k <= chain.links(); ++k) {
    const double c =
        cross2(chain.joint(k + 1) - chain.joint(k), chain.joint(k) - chain.joint(k - 1));
    acc += chain.eps(k) * c * c;
  }
  return acc;
}

double potential_H(const LinkChain& chain) {
  const double l2 = chain.link_length * chain.link_length;
  double acc = 0.0;
  for (int k = 0; k <= chain.links(); ++k) {
    const double turn =
        cross2(chain.joint(k) - chain.joint(k - 1), chain.joint(k + 1) - chain.joint(k)) / l2;
    const double mismatch = std::sin(chain.angle_bound(k) * chain.control(k)) - turn;
    acc += chain.mu(k) * mismatch * mismatch;
  }
  return acc;
}

double discrete_lagrangian(const LinkChain& chain, const VectorField& velocities,
                           const ScalarField& link_sigma) {
  if (velocities.cols() != chain.joints.cols()) throw SizingError("one velocity per joint");
  const double l = chain.link_length;
  double kinetic = 0.0;
  for (int k = 0; k < velocities.cols(); ++k) {
    kinetic += 0.5 * chain.mass(k) * velocities.col(k).squaredNorm();
  }
  return kinetic - potential_F(chain, link_sigma) / (2.0 * l) - potential_G(chain) / (l * l * l) -
         potential_B(chain) / (2.0 * std::pow(l, 5)) - potential_H(chain) / (2.0 * l);
}

double continuum_lagrangian(const VectorField& q, const VectorField& q_t, const ScalarField& sigma,
                            const ScalarField& u, const ModelParams& params) {
  const Grid& grid = params.grid;
  const int n = grid.size();
  if (q.cols() != n || q_t.cols() != n || sigma.size() != n || u.size() != n) {
    throw SizingError("continuum Lagrangian fields must match the grid");
  }
  const VectorField qs = d1(q, grid);
  const VectorField qss = d2(q, grid);
  ScalarField density(n);
  for (int i = 0; i < n; ++i) {
    const double k2 = qss.col(i).squaredNorm();
    const double excess = positive_part(k2 - params.omega(i) * params.omega(i));
    const double mismatch = params.omega(i) * u(i) - cross2(qs.col(i), qss.col(i));
    density(i) = 0.5 * params.rho(i) * q_t.col(i).squaredNorm() -
                 0.5 * sigma(i) * (qs.col(i).squaredNorm() - 1.0) -
                 0.25 * params.nu(i) * excess * excess - 0.5 * params.eps(i) * k2 -
                 0.5 * params.mu(i) * mismatch * mismatch;
  }
  return grid.integrate(density);
}

}  // namespace softarm
