#include "softarm/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "softarm/errors.hpp"

namespace softarm {

ModelParams::ModelParams(const Grid& g)
    : grid(g),
      rho(ScalarField::Ones(g.size())),
      omega(ScalarField::Ones(g.size())),
      eps(ScalarField::Ones(g.size())),
      nu(ScalarField::Zero(g.size())),
      mu(ScalarField::Zero(g.size())),
      beta(ScalarField::Zero(g.size())),
      gamma(ScalarField::Zero(g.size())) {}

namespace {

void check_profile(const ScalarField& f, int n, const char* name, bool strictly_positive) {
  if (f.size() != n) {
    throw ConfigError(std::string("profile ") + name + " has " + std::to_string(f.size()) +
                      " samples, grid has " + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    const double v = f(i);
    if (!std::isfinite(v) || v < 0.0 || (strictly_positive && v == 0.0)) {
      throw ConfigError(std::string("profile ") + name + " violates its sign constraint at node " +
                        std::to_string(i));
    }
  }
}

}  // namespace

void ModelParams::validate() const {
  const int n = grid.size();
  check_profile(rho, n, "rho", true);
  check_profile(omega, n, "omega", true);
  check_profile(eps, n, "eps", true);
  check_profile(nu, n, "nu", false);
  check_profile(mu, n, "mu", false);
  check_profile(beta, n, "beta", false);
  check_profile(gamma, n, "gamma", false);
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive");
}

ScalarField ModelParams::omega_bar() const {
  return (mu.array() * omega.array() / (mu.array() + eps.array())).matrix();
}

ActuationMask ActuationMask::from_intervals(std::vector<Interval> intervals) {
  ActuationMask m;
  for (const Interval& iv : intervals) {
    if (!(iv.lo <= iv.hi)) throw ConfigError("deactivation interval with lo > hi");
  }
  m.intervals_ = std::move(intervals);
  return m;
}

ActuationMask ActuationMask::all_except(std::vector<double> points) {
  ActuationMask m;
  m.complement_ = true;
  m.points_ = std::move(points);
  return m;
}

std::vector<bool> ActuationMask::nodes(const Grid& grid) const {
  const int n = grid.size();
  constexpr double kTol = 1e-12;
  if (complement_) {
    std::vector<bool> out(n, true);
    for (double p : points_) out[grid.nearest_node(p)] = false;
    return out;
  }
  std::vector<bool> out(n, false);
  for (int i = 0; i < n; ++i) {
    const double s = grid.s(i);
    out[i] = std::any_of(intervals_.begin(), intervals_.end(), [&](const Interval& iv) {
      return s >= iv.lo - kTol && s <= iv.hi + kTol;
    });
  }
  return out;
}

ModelParams deactivate(const ModelParams& params, const ActuationMask& mask) {
  ModelParams out = params;
  const std::vector<bool> off = mask.nodes(params.grid);
  for (int i = 0; i < params.grid.size(); ++i) {
    if (off[i]) out.mu(i) = 0.0;
  }
  return out;
}

ScalarField admissible_control(const ScalarField& u, const std::vector<bool>& deactivated) {
  ScalarField out = u.cwiseMax(-1.0).cwiseMin(1.0);
  for (int i = 0; i < out.size(); ++i) {
    if (deactivated[i]) out(i) = 0.0;
  }
  return out;
}

SpaceTimeControl SpaceTimeControl::constant(const ScalarField& u, int n_steps) {
  SpaceTimeControl c;
  c.values = u.replicate(1, n_steps);
  return c;
}

}  // namespace softarm
