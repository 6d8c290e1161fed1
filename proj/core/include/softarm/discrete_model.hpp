#pragma once

#include "softarm/params.hpp"
#include "softarm/types.hpp"

namespace softarm {

/// N-link hyper-redundant chain with joints q_0..q_N and link length l = 1/N.
///
/// Per-joint data is sampled at s = k l: masses m_k = rho_k l, angle bounds
/// alpha_k = omega_k l, penalties nu_k, mu_k, eps_k, and controls u_k.
/// Ghost joints q_{-1} = q_0 + l (0, 1) and q_{N+1} = 2 q_N - q_{N-1}.
struct LinkChain {
  VectorField joints;
  double link_length = 0.0;
  ScalarField mass;
  ScalarField angle_bound;
  ScalarField nu;
  ScalarField mu;
  ScalarField eps;
  ScalarField control;

  /// Samples the chain data from profiles on an (N+1)-node grid.
  static LinkChain from_params(const ModelParams& params, const VectorField& joints,
                               const ScalarField& control);

  int links() const { return static_cast<int>(joints.cols()) - 1; }

  /// Joint k for k in [-1, N+1], ghosts included.
  Vec2 joint(int k) const;
};

/// sum_{k=1}^{N} sigma_k (|q_k - q_{k-1}|^2 - l^2); sigma has one entry per link (size N).
double potential_F(const LinkChain& chain, const ScalarField& link_sigma);
/// sum_{k=0}^{N} nu_k (cos alpha_k - (q_{k+1} - q_k).(q_k - q_{k-1}) / l^2)_+^2
double potential_G(const LinkChain& chain);
/// sum_{k=0}^{N} eps_k ((q_{k+1} - q_k) × (q_k - q_{k-1}))^2
double potential_B(const LinkChain& chain);
/// sum_{k=0}^{N} mu_k (sin(alpha_k u_k) - (q_k - q_{k-1}) × (q_{k+1} - q_k) / l^2)^2
double potential_H(const LinkChain& chain);

/// sum_k m_k |qdot_k|^2 / 2 - F/(2l) - G/l^3 - B/(2l^5) - H/(2l).
double discrete_lagrangian(const LinkChain& chain, const VectorField& velocities,
                           const ScalarField& link_sigma);

/// Trapezoid rule of
///   rho/2 |q_t|^2 - sigma/2 (|q_s|^2 - 1) - nu/4 (|q_ss|^2 - omega^2)_+^2
///   - eps/2 |q_ss|^2 - mu/2 (omega u - q_s × q_ss)^2
/// with the generic finite-difference stencils.
double continuum_lagrangian(const VectorField& q, const VectorField& q_t, const ScalarField& sigma,
                            const ScalarField& u, const ModelParams& params);

}  // namespace softarm
