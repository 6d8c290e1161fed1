#include "softarm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "softarm/errors.hpp"
#include "softarm/planar.hpp"

namespace softarm {

using Eigen::VectorXd;

namespace {

VectorField scale_nodes(const ScalarField& weights, const VectorField& w) {
  return w * weights.asDiagonal();
}

}  // namespace

namespace links {

VectorXd apply(const VectorField& q, const VectorField& w) {
  const int m = static_cast<int>(q.cols()) - 1;
  VectorXd out(m);
  for (int j = 0; j < m; ++j) {
    out(j) = 2.0 * (q.col(j + 1) - q.col(j)).dot(w.col(j + 1) - w.col(j));
  }
  return out;
}

VectorField apply_transpose(const VectorField& q, const VectorXd& lambda) {
  VectorField out = VectorField::Zero(2, q.cols());
  for (int j = 0; j < lambda.size(); ++j) {
    const Vec2 g = 2.0 * lambda(j) * (q.col(j + 1) - q.col(j));
    out.col(j + 1) += g;
    out.col(j) -= g;
  }
  return out;
}

VectorField curvature_term(const VectorField& w, const VectorXd& zeta) {
  VectorField out = VectorField::Zero(2, w.cols());
  for (int j = 0; j < zeta.size(); ++j) {
    const Vec2 g = 2.0 * zeta(j) * (w.col(j + 1) - w.col(j));
    out.col(j + 1) += g;
    out.col(j) -= g;
  }
  return out;
}

VectorXd solve_schur(const VectorField& q, const ScalarField& inv_mass, const VectorXd& rhs) {
  const int m = static_cast<int>(q.cols()) - 1;
  VectorXd diag(m), upper(m), x(m);
  for (int j = 0; j < m; ++j) {
    const Vec2 d = q.col(j + 1) - q.col(j);
    diag(j) = 4.0 * d.squaredNorm() * (inv_mass(j + 1) + inv_mass(j));
    upper(j) = j + 1 < m ? -4.0 * d.dot(q.col(j + 2) - q.col(j + 1)) * inv_mass(j + 1) : 0.0;
  }
  // Thomas algorithm; the matrix is symmetric positive definite for non-degenerate links.
  VectorXd c(m);
  x = rhs;
  double pivot = diag(0);
  for (int j = 0; j < m; ++j) {
    if (j > 0) {
      pivot = diag(j) - upper(j - 1) * c(j - 1);
      x(j) -= upper(j - 1) * x(j - 1);
    }
    if (!(pivot > 1e-14 * std::abs(diag(j))) || !std::isfinite(pivot)) {
      throw SingularSystem("link constraint system is singular at link " + std::to_string(j));
    }
    c(j) = upper(j) / pivot;
    x(j) /= pivot;
  }
  for (int j = m - 2; j >= 0; --j) x(j) -= c(j) * x(j + 1);
  return x;
}

}  // namespace links

RodModel::RodModel(const ModelParams& params)
    : potential_(params),
      mass_(params.grid.size()),
      inv_mass_(params.grid.size()),
      beta_weight_(params.grid.size()) {
  const Grid& grid = params.grid;
  for (int i = 0; i < grid.size(); ++i) {
    const double cell = grid.weight(i) * grid.ds();
    mass_(i) = params.rho(i) * cell;
    inv_mass_(i) = i == 0 ? 0.0 : 1.0 / mass_(i);
    beta_weight_(i) = params.beta(i) * cell;
  }
}

VectorField RodModel::friction(const VectorField& v) const {
  return scale_nodes(beta_weight_, v) + potential_.internal_friction(v);
}

VectorField RodModel::applied_forces(const VectorField& q, const VectorField& v,
                                     const ScalarField& u) const {
  return -potential_.gradient(q, u) - friction(v);
}

Acceleration RodModel::acceleration(const VectorField& q, const VectorField& v,
                                    const ScalarField& u, const VectorField* external) const {
  Acceleration out;
  out.force = applied_forces(q, v, u);
  if (external) out.force += *external;
  VectorXd rhs = links::apply(q, scale_nodes(inv_mass_, out.force));
  for (int j = 0; j < rhs.size(); ++j) {
    rhs(j) += 2.0 * (v.col(j + 1) - v.col(j)).squaredNorm();
  }
  out.lambda = -links::solve_schur(q, inv_mass_, rhs);
  out.a = scale_nodes(inv_mass_, out.force + links::apply_transpose(q, out.lambda));
  return out;
}

void RodModel::acceleration_transpose(const VectorField& q, const VectorField& v,
                                      const ScalarField& u, const Acceleration& fwd,
                                      const VectorField& a_bar, VectorField& q_bar,
                                      VectorField& v_bar, ScalarField& u_bar,
                                      VectorXd* zeta_out) const {
  const VectorField r = scale_nodes(inv_mass_, a_bar);
  const VectorXd zeta = links::solve_schur(q, inv_mass_, links::apply(q, r));
  const VectorField f_bar = r - scale_nodes(inv_mass_, links::apply_transpose(q, zeta));
  q_bar += -potential_.hessian_product(q, u, f_bar) + links::curvature_term(f_bar, fwd.lambda) -
           links::curvature_term(fwd.a, zeta);
  v_bar += -friction(f_bar) - 2.0 * links::curvature_term(v, zeta);
  u_bar -= potential_.mixed_product(q, f_bar);
  if (zeta_out) *zeta_out = zeta;
}

VectorXd RodModel::link_tension(const VectorXd& lambda) const {
  return -2.0 * grid().ds() * lambda;
}

ScalarField RodModel::nodal_tension(const VectorXd& lambda) const {
  const VectorXd link = link_tension(lambda);
  const int n = grid().size();
  const int m = n - 1;
  ScalarField sigma(n);
  sigma(0) = 1.5 * link(0) - 0.5 * link(1);
  for (int i = 1; i + 1 < n; ++i) sigma(i) = 0.5 * (link(i - 1) + link(i));
  sigma(n - 1) = 1.5 * link(m - 1) - 0.5 * link(m - 2);
  return sigma;
}

double RodModel::stable_step(const RodState& state, double safety) const {
  const ModelParams& p = params();
  const Grid& g = grid();
  const RodStencil::Geometry geo = potential_.stencil().evaluate(state.q);
  const double ds2 = g.ds() * g.ds();
  double omega2 = 0.0;
  double damping = 0.0;
  for (int i = 1; i < g.size(); ++i) {
    const double k2 = geo.curvature.col(i).squaredNorm();
    const double w2 = p.omega(i) * p.omega(i);
    const double bending =
        p.eps(i) + p.mu(i) + p.nu(i) * std::max(2.0 * w2, 3.0 * k2 - w2);
    const double tension = state.sigma.size() ? std::abs(state.sigma(i)) : 0.0;
    const double density = p.rho(i) * g.weight(i);
    omega2 = std::max(omega2, (16.0 * bending / (ds2 * ds2) + 8.0 * tension / ds2) / density);
    damping = std::max(damping, (16.0 * p.gamma(i) / (ds2 * ds2) + p.beta(i)) / density);
  }
  double h = safety * 2.0 / std::sqrt(omega2);
  if (damping > 0.0) h = std::min(h, safety * 2.0 / damping);
  return h;
}

double RodModel::kinetic_energy(const VectorField& v) const {
  return 0.5 * (v.colwise().squaredNorm().transpose().array() * mass_.array()).sum();
}

namespace {

VectorField renormalize_links(const VectorField& q, double ds) {
  VectorField out(2, q.cols());
  out.col(0) = q.col(0);
  for (int j = 0; j + 1 < q.cols(); ++j) {
    const Vec2 d = q.col(j + 1) - q.col(j);
    out.col(j + 1) = out.col(j) + ds * d / d.norm();
  }
  return out;
}

}  // namespace

RodState verlet_substep(const RodModel& model, const VectorField& q, const VectorField& v,
                        const ScalarField& u, double h, SubstepTape* tape) {
  const ScalarField& im = model.inverse_masses();
  Acceleration start = model.acceleration(q, v, u);
  VectorField v_half = v + 0.5 * h * start.a;
  VectorField q_drift = q + h * v_half;
  Acceleration end = model.acceleration(q_drift, v_half, u);
  VectorField v_end = v_half + 0.5 * h * end.a;
  RodState out;
  out.q = renormalize_links(q_drift, model.grid().ds());
  VectorXd projection = links::solve_schur(out.q, im, links::apply(out.q, v_end));
  out.v = v_end - scale_nodes(im, links::apply_transpose(out.q, projection));
  if (tape) {
    tape->q = q;
    tape->v = v;
    tape->start = std::move(start);
    tape->v_half = std::move(v_half);
    tape->q_drift = std::move(q_drift);
    tape->end = std::move(end);
    tape->v_end = std::move(v_end);
    tape->q_out = out.q;
    tape->projection = std::move(projection);
    tape->v_out = out.v;
  }
  return out;
}

void verlet_substep_transpose(const RodModel& model, const SubstepTape& tape, const ScalarField& u,
                              double h, const VectorField& q_out_bar, const VectorField& v_out_bar,
                              VectorField& q_bar, VectorField& v_bar, ScalarField& u_bar,
                              VectorXd* zeta) {
  const ScalarField& im = model.inverse_masses();
  const double ds = model.grid().ds();
  const int n = static_cast<int>(tape.q.cols());

  // Velocity projection at the renormalized positions.
  const VectorField y = scale_nodes(im, v_out_bar);
  const VectorXd eta = links::solve_schur(tape.q_out, im, links::apply(tape.q_out, y));
  const VectorField v_end_bar = v_out_bar - links::apply_transpose(tape.q_out, eta);
  const VectorField q_out_total =
      q_out_bar -
      links::curvature_term(y - scale_nodes(im, links::apply_transpose(tape.q_out, eta)),
                            tape.projection) -
      links::curvature_term(tape.v_out, eta);

  // Link renormalization from the clamp.
  VectorField drift_bar = VectorField::Zero(2, n);
  Vec2 suffix = Vec2::Zero();
  for (int j = n - 2; j >= 0; --j) {
    suffix += q_out_total.col(j + 1);
    const Vec2 d = tape.q_drift.col(j + 1) - tape.q_drift.col(j);
    const double len = d.norm();
    const Vec2 t = d / len;
    const Vec2 g = ds * (suffix - t * t.dot(suffix)) / len;
    drift_bar.col(j + 1) += g;
    drift_bar.col(j) -= g;
  }

  VectorField v_half_bar = v_end_bar;
  model.acceleration_transpose(tape.q_drift, tape.v_half, u, tape.end, 0.5 * h * v_end_bar,
                               drift_bar, v_half_bar, u_bar);
  q_bar += drift_bar;
  v_half_bar += h * drift_bar;
  v_bar += v_half_bar;
  model.acceleration_transpose(tape.q, tape.v, u, tape.start, 0.5 * h * v_half_bar, q_bar, v_bar,
                               u_bar, zeta);
  q_bar.col(0).setZero();
  v_bar.col(0).setZero();
}

VectorField internal_forces(const VectorField& q, const ScalarField& sigma, const ScalarField& u,
                            const ModelParams& params) {
  const Grid& grid = params.grid;
  const int n = grid.size();
  if (q.cols() != n || sigma.size() != n || u.size() != n) {
    throw SizingError("internal_forces fields must match the grid");
  }
  RodPotential potential(params);
  VectorXd lambda(n - 1);
  for (int j = 0; j + 1 < n; ++j) lambda(j) = -0.5 * (sigma(j) + sigma(j + 1)) / (2.0 * grid.ds());
  VectorField force = links::apply_transpose(q, lambda) - potential.gradient(q, u);
  for (int i = 0; i < n; ++i) force.col(i) /= grid.weight(i) * grid.ds();
  force.col(0).setZero();
  return force;
}

ScalarField solve_tension(const VectorField& q, const VectorField& v, const ScalarField& u,
                          const ModelParams& params, const VectorField* external_density) {
  RodModel model(params);
  const Grid& grid = params.grid;
  if (q.cols() != grid.size() || v.cols() != grid.size() || u.size() != grid.size()) {
    throw SizingError("solve_tension fields must match the grid");
  }
  VectorField external;
  if (external_density) {
    external = *external_density;
    for (int i = 0; i < grid.size(); ++i) external.col(i) *= grid.weight(i) * grid.ds();
  }
  const Acceleration acc = model.acceleration(q, v, u, external_density ? &external : nullptr);
  return model.nodal_tension(acc.lambda);
}

int substeps_for(const RodModel& model, const RodState& state, double dt,
                 const DynamicsOptions& options) {
  if (options.substeps > 0) return options.substeps;
  return std::max(1, static_cast<int>(std::ceil(dt / model.stable_step(state, options.safety))));
}

RodState step(const RodModel& model, const RodState& state, const ScalarField& u, double dt,
              int substeps) {
  const double h = dt / substeps;
  RodState s = state;
  for (int k = 0; k < substeps; ++k) s = verlet_substep(model, s.q, s.v, u, h);
  s.sigma = model.nodal_tension(model.acceleration(s.q, s.v, u).lambda);
  return s;
}

RodState rest_state(const Grid& grid) {
  RodState s;
  s.q = VectorField::Zero(2, grid.size());
  for (int i = 0; i < grid.size(); ++i) s.q(1, i) = -grid.s(i);
  s.v = VectorField::Zero(2, grid.size());
  s.sigma = ScalarField::Zero(grid.size());
  return s;
}

namespace {

double max_stretch(const VectorField& q, double ds) {
  double worst = 0.0;
  for (int j = 0; j + 1 < q.cols(); ++j) {
    worst = std::max(worst, std::abs((q.col(j + 1) - q.col(j)).norm() / ds - 1.0));
  }
  return worst;
}

}  // namespace

ForwardRun simulate(const RodModel& model, const RodState& initial,
                    const SpaceTimeControl& control, const TimeGrid& time,
                    const DynamicsOptions& options) {
  const Grid& grid = model.grid();
  if (initial.q.cols() != grid.size() || initial.v.cols() != grid.size()) {
    throw SizingError("initial state does not match the grid");
  }
  if (control.n_nodes() != grid.size() || control.n_steps() != time.n_steps) {
    throw SizingError("space-time control must have one column per macro step");
  }
  if (!(time.dt > 0.0)) throw ConfigError("time step must be positive");
  ForwardRun run;
  run.time = time;
  run.control = control;
  run.states.reserve(time.n_steps + 1);
  run.substeps.reserve(time.n_steps);
  RodState s = initial;
  const ScalarField u0 = time.n_steps > 0 ? control.at(0) : ScalarField::Zero(grid.size());
  s.sigma = model.nodal_tension(model.acceleration(s.q, s.v, u0).lambda);
  auto record = [&](const RodState& st, const ScalarField& u) {
    run.stretch.push_back(max_stretch(st.q, grid.ds()));
    run.kinetic.push_back(model.kinetic_energy(st.v));
    run.potential.push_back(model.potential().energy(st.q, u).total());
    run.states.push_back(st);
  };
  record(s, u0);
  for (int k = 0; k < time.n_steps; ++k) {
    const ScalarField u = control.at(k);
    run.substeps.push_back(substeps_for(model, s, time.dt, options));
    if (options.substeps > 0 && time.dt / options.substeps > model.stable_step(s, 1.0)) {
      throw NumericalInstability("fixed substep count is above the stability limit at macro step " +
                                     std::to_string(k + 1),
                                 k + 1);
    }
    s = step(model, s, u, time.dt, run.substeps.back());
    const bool finite = s.q.allFinite() && s.v.allFinite();
    if (!finite || s.q.colwise().norm().maxCoeff() > options.position_bound) {
      throw NumericalInstability("forward integration blew up at macro step " +
                                     std::to_string(k + 1),
                                 k + 1);
    }
    record(s, u);
  }
  return run;
}

}  // namespace softarm
