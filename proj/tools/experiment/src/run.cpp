#include "softarm/experiment/run.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include "softarm/adjoint.hpp"
#include "softarm/elastica.hpp"
#include "softarm/errors.hpp"
#include "softarm/grasping.hpp"
#include "softarm/rod.hpp"
#include "softarm/static_solver.hpp"

#ifndef SOFTARM_VERSION
#define SOFTARM_VERSION "unknown"
#endif

namespace softarm::experiment {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(RunStatus status) {
  switch (status) {
    case RunStatus::kSuccess:
      return 0;
    case RunStatus::kNonConvergence:
      return 3;
    case RunStatus::kInstability:
      return 4;
  }
  return 1;
}

namespace {

std::string status_name(RunStatus status) {
  switch (status) {
    case RunStatus::kSuccess:
      return "success";
    case RunStatus::kNonConvergence:
      return "non-convergence";
    case RunStatus::kInstability:
      return "numerical-instability";
  }
  return "unknown";
}

}  // namespace

json RunManifest::to_json() const {
  json files_json = json::array();
  for (const OutputFile& f : files) {
    files_json.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  }
  return {{"config_hash", config_hash}, {"version", version},
          {"status", status_name(status)}, {"message", message},
          {"timings", timings},          {"convergence", convergence},
          {"files", files_json}};
}

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

std::string format_number(double value) {
  std::array<char, 32> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

namespace {

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      out_ << (first ? "" : ",") << format_number(v);
      first = false;
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

class RunWriter {
 public:
  explicit RunWriter(const ExperimentConfig& config) : dir_(config.output_dir) {
    fs::create_directories(dir_);
  }

  fs::path path(const std::string& name) {
    names_.push_back(name);
    return dir_ / name;
  }

  void write_text(const std::string& name, const std::string& text) {
    std::ofstream out(path(name), std::ios::binary);
    out << text;
  }

  void write_json(const std::string& name, const json& doc) { write_text(name, doc.dump(2) + "\n"); }

  std::vector<OutputFile> inventory() const {
    std::vector<OutputFile> files;
    for (const std::string& name : names_) {
      const fs::path p = dir_ / name;
      files.push_back({name, sha256_file(p.string()), fs::file_size(p)});
    }
    return files;
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

void write_curve(RunWriter& w, const std::string& name, const Grid& grid, const VectorField& q,
                 const ScalarField& kappa, const ScalarField& omega_bar, const ScalarField& u) {
  CsvWriter csv(w.path(name), {"s", "q_x", "q_y", "kappa", "omega_bar", "u"});
  for (int i = 0; i < grid.size(); ++i) {
    csv.row({grid.s(i), q(0, i), q(1, i), kappa(i), omega_bar(i), u(i)});
  }
}

json static_report_json(const StaticReport& r) {
  return {{"converged", r.converged},
          {"termination", r.termination},
          {"outer_iterations", r.outer_iterations},
          {"inner_iterations", r.inner_iterations},
          {"equality_residual", r.equality_residual},
          {"inequality_residual", r.inequality_residual},
          {"stationarity", r.stationarity},
          {"stretch_residual", r.stretch_residual},
          {"curvature_energy", r.curvature_energy},
          {"control_energy", r.control_energy},
          {"target_term", r.target_term},
          {"cost", r.cost},
          {"warnings", r.warnings}};
}

json point_json(const Vec2& p) { return json::array({p.x(), p.y()}); }

std::string static_plot(const std::string& extra_shape, const std::string& extra_data) {
  std::ostringstream gp;
  gp << "set datafile separator ','\n"
     << "set terminal png size 1200,520\n"
     << "set output 'figure.png'\n"
     << "set multiplot layout 1,2\n"
     << "set title 'q(s)'\n"
     << "set size ratio -1\n"
     << "set xlabel 'x'\n"
     << "set ylabel 'y'\n"
     << "plot 'curve.csv' every ::1 using 2:3 with lines lw 3 title 'q'" << extra_shape << "\n"
     << extra_data
     << "set title 'signed curvature'\n"
     << "set size noratio\n"
     << "set xlabel 's'\n"
     << "set ylabel 'kappa'\n"
     << "plot 'curve.csv' every ::1 using 1:4 with lines lw 3 title 'kappa', \\\n"
     << "     '' every ::1 using 1:5 with lines lw 1 title 'omega_bar', \\\n"
     << "     '' every ::1 using 1:(-$5) with lines lw 1 title '-omega_bar'\n"
     << "unset multiplot\n";
  return gp.str();
}

struct Clock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

RunStatus run_static_reach(const ExperimentConfig& config, RunWriter& w, RunManifest& m) {
  const ModelParams params = make_params(config);
  const StaticProblem problem(params, make_mask(config), config.target,
                              config.curvature_constraint);
  StaticOptions options;
  options.solver = make_solver_options(config, InnerMethod::kBfgs);
  Clock clock;
  const StaticSolution sol = solve_static_reachability(problem, options);
  m.timings["solve_seconds"] = clock.seconds();
  write_curve(w, "curve.csv", problem.grid(), sol.curve, sol.kappa, problem.omega_bar(),
              sol.control);
  m.convergence = static_report_json(sol.report);
  json report = {{"mode", to_string(config.mode)},
                 {"solver", m.convergence},
                 {"tip", point_json(sol.curve.col(sol.curve.cols() - 1))},
                 {"target", point_json(config.target)}};
  w.write_json("report.json", report);
  std::ostringstream target;
  target << format_number(config.target.x()) << "," << format_number(config.target.y());
  w.write_text("plot.gp",
               static_plot(", '-' using 1:2 with points pt 7 ps 2 title 'q*'",
                           target.str() + "\ne\n"));
  return sol.report.converged ? RunStatus::kSuccess : RunStatus::kNonConvergence;
}

void write_object(RunWriter& w, const GraspTarget& object) {
  CsvWriter csv(w.path("object.csv"), {"x", "y"});
  if (const auto* c = std::get_if<Circle>(&object.shape())) {
    constexpr int kSamples = 256;
    for (int k = 0; k <= kSamples; ++k) {
      const double a = 2.0 * std::numbers::pi * k / kSamples;
      csv.row({c->center.x() + c->radius * std::cos(a), c->center.y() + c->radius * std::sin(a)});
    }
    return;
  }
  std::vector<Vec2> corners;
  if (const auto* sq = std::get_if<Square>(&object.shape())) {
    const double h = sq->half_side;
    corners = {sq->center + Vec2(-h, -h), sq->center + Vec2(h, -h), sq->center + Vec2(h, h),
               sq->center + Vec2(-h, h)};
  } else {
    corners = std::get<ConvexPolygon>(object.shape()).vertices;
  }
  corners.push_back(corners.front());
  for (const Vec2& p : corners) csv.row({p.x(), p.y()});
}

RunStatus run_static_grasp(const ExperimentConfig& config, RunWriter& w, RunManifest& m) {
  const ModelParams params = make_params(config);
  const GraspProblem problem(params, make_mask(config), make_object(config), make_weight(config),
                             config.curvature_constraint);
  GraspOptions options;
  options.solver.solver = make_solver_options(config, InnerMethod::kNewton);
  Clock clock;
  const GraspSolution sol = solve_static_grasping(problem, options);
  m.timings["solve_seconds"] = clock.seconds();
  write_curve(w, "curve.csv", problem.base().grid(), sol.curve, sol.kappa,
              problem.base().omega_bar(), sol.control);
  write_object(w, problem.target());
  const GraspReport& r = sol.report;
  m.convergence = static_report_json(r.solver);
  json report = {{"mode", to_string(config.mode)},
                 {"solver", m.convergence},
                 {"object", problem.target().kind()},
                 {"cost",
                  {{"control", r.cost.control},
                   {"obstacle", r.cost.obstacle},
                   {"attraction", r.cost.attraction},
                   {"total", r.cost.total()}}},
                 {"max_penetration", r.max_penetration},
                 {"contact_nodes", r.contact_nodes},
                 {"attracted_nodes", r.attracted_nodes},
                 {"mean_attracted_gap", r.mean_attracted_gap}};
  w.write_json("report.json", report);
  w.write_text("plot.gp", static_plot(", 'object.csv' every ::1 using 1:2 with lines lw 1 title 'object'", ""));
  return r.solver.converged ? RunStatus::kSuccess : RunStatus::kNonConvergence;
}

void write_energy(RunWriter& w, const std::string& name, const CostSeries& series) {
  CsvWriter csv(w.path(name), {"t", "J_target", "J_u", "J_v"});
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    csv.row({series.t[k], series.tip[k], series.control[k], series.kinetic[k]});
  }
}

json cost_json(const DynamicCost& c) {
  return {{"target", c.tip},
          {"control", c.control},
          {"terminal_kinetic", c.terminal_kinetic},
          {"total", c.total()}};
}

json gradient_check(const DynamicProblem& problem, const DynamicSolution& sol,
                    const DynamicsOptions& dynamics, int directions, std::uint64_t seed) {
  const AdjointRun adj = solve_adjoint(sol.run, problem);
  const Eigen::MatrixXd grad = control_gradient(sol.run, adj, problem);
  const Grid& grid = problem.model().grid();
  const double dt = problem.time().dt;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  json checks = json::array();
  for (int d = 0; d < directions; ++d) {
    Eigen::MatrixXd dir(grad.rows(), grad.cols());
    for (Eigen::Index j = 0; j < dir.cols(); ++j) {
      for (Eigen::Index i = 0; i < dir.rows(); ++i) {
        dir(i, j) = problem.deactivated()[i] ? 0.0 : normal(rng);
      }
    }
    constexpr double kStep = 1e-6;
    SpaceTimeControl plus = sol.control;
    SpaceTimeControl minus = sol.control;
    plus.values += kStep * dir;
    minus.values -= kStep * dir;
    const double fd = (evaluate_dynamic(problem, plus, dynamics).cost.total() -
                       evaluate_dynamic(problem, minus, dynamics).cost.total()) /
                      (2.0 * kStep);
    const double adjoint = space_time_dot(grad, dir, grid, dt);
    checks.push_back({{"adjoint", adjoint},
                      {"finite_difference", fd},
                      {"relative_error", std::abs(adjoint - fd) / std::max(std::abs(fd), 1e-300)}});
  }
  return checks;
}

RunStatus run_dynamic_reach(const ExperimentConfig& config, RunWriter& w, RunManifest& m) {
  const ModelParams params = make_params(config);
  const ActuationMask mask = make_mask(config);
  const StaticProblem static_problem(params, mask, config.target, config.curvature_constraint);
  StaticOptions static_options;
  static_options.solver = make_solver_options(config, InnerMethod::kBfgs);
  Clock clock;
  const StaticSolution stat = solve_static_reachability(static_problem, static_options);
  m.timings["static_solve_seconds"] = clock.seconds();
  const Grid& grid = static_problem.grid();
  write_curve(w, "static_curve.csv", grid, stat.curve, stat.kappa, static_problem.omega_bar(),
              stat.control);

  const DynamicSpec& settings = config.dynamic;
  const TimeGrid time{settings.dt, static_cast<int>(std::lround(settings.final_time / settings.dt))};
  DynamicsOptions dynamics;
  dynamics.substeps = settings.substeps;
  const DynamicProblem problem(params, mask, config.target, time, rest_state(grid), dynamics);
  const ScalarField u0 =
      settings.initial_control == "static" ? stat.control : ScalarField::Zero(grid.size());
  const SpaceTimeControl initial = SpaceTimeControl::constant(u0, time.n_steps);

  DynamicOptimizerOptions opt;
  opt.max_iterations = settings.max_iterations;
  opt.tolerance = settings.tolerance;
  clock = Clock();
  const DynamicSolution dyn = optimize_dynamic(problem, initial, opt);
  m.timings["dynamic_solve_seconds"] = clock.seconds();
  DynamicsOptions frozen = dynamics;
  frozen.substeps = dyn.report.substeps;
  const DynamicSolution baseline =
      evaluate_dynamic(problem, SpaceTimeControl::constant(stat.control, time.n_steps), frozen);

  const int last = time.n_steps;
  const VectorField& q_end = dyn.run.states[last].q;
  const ScalarField u_end = dyn.control.at(last - 1);
  const RodStencil stencil(grid);
  write_curve(w, "curve.csv", grid, q_end, stencil.signed_curvature(q_end),
              static_problem.omega_bar(), u_end);
  write_energy(w, "energy.csv", dyn.series);
  write_energy(w, "energy_static.csv", baseline.series);
  {
    CsvWriter traj(w.path("trajectory.csv"), {"t", "s", "q_x", "q_y"});
    CsvWriter ctrl(w.path("control.csv"), {"t", "s", "u"});
    for (int k = 0; k <= last; k += settings.output_stride) {
      const double t = k * time.dt;
      const VectorField& q = dyn.run.states[k].q;
      const ScalarField u = dyn.control.at(std::min(k, last - 1));
      for (int i = 0; i < grid.size(); ++i) {
        traj.row({t, grid.s(i), q(0, i), q(1, i)});
        ctrl.row({t, grid.s(i), u(i)});
      }
    }
  }

  json iterations = json::array();
  for (const IterationRecord& r : dyn.report.iterations) {
    iterations.push_back({{"iteration", r.iteration},
                          {"cost", r.cost.total()},
                          {"projected_gradient", r.projected_gradient},
                          {"step", r.step},
                          {"backtracks", r.backtracks}});
  }
  m.convergence = {{"static", static_report_json(stat.report)},
                   {"dynamic",
                    {{"converged", dyn.report.converged},
                     {"termination", dyn.report.termination},
                     {"accepted", dyn.report.accepted},
                     {"substeps", dyn.report.substeps}}}};
  json report = {{"mode", to_string(config.mode)},
                 {"convergence", m.convergence},
                 {"iterations", iterations},
                 {"dynamic_cost", cost_json(dyn.cost)},
                 {"static_cost", cost_json(baseline.cost)},
                 {"max_stretch", *std::max_element(dyn.run.stretch.begin(), dyn.run.stretch.end())}};
  if (settings.gradient_check_directions > 0) {
    report["gradient_check"] =
        gradient_check(problem, dyn, frozen, settings.gradient_check_directions, config.seed);
  }
  w.write_json("report.json", report);

  std::ostringstream gp;
  gp << "set datafile separator ','\n"
     << "set terminal png size 1200,900\n"
     << "set output 'figure.png'\n"
     << "set multiplot layout 2,2\n"
     << "set xlabel 't'\n"
     << "set title 'J_target(t)'\n"
     << "plot 'energy.csv' every ::1 using 1:2 with lines lw 2 title 'dynamic', \\\n"
     << "     'energy_static.csv' every ::1 using 1:2 with lines lw 1 title 'static'\n"
     << "set title 'J_u(t)'\n"
     << "plot 'energy.csv' every ::1 using 1:3 with lines lw 2 title 'dynamic', \\\n"
     << "     'energy_static.csv' every ::1 using 1:3 with lines lw 1 title 'static'\n"
     << "set title 'J_v(t)'\n"
     << "plot 'energy.csv' every ::1 using 1:4 with lines lw 2 title 'dynamic', \\\n"
     << "     'energy_static.csv' every ::1 using 1:4 with lines lw 1 title 'static'\n"
     << "set title 'q(s, T)'\n"
     << "set xlabel 'x'\n"
     << "set size ratio -1\n"
     << "plot 'curve.csv' every ::1 using 2:3 with lines lw 3 title 'dynamic', \\\n"
     << "     'static_curve.csv' every ::1 using 2:3 with lines lw 1 title 'static'\n"
     << "unset multiplot\n";
  w.write_text("plot.gp", gp.str());

  const bool ok = stat.report.converged && dyn.report.converged;
  return ok ? RunStatus::kSuccess : RunStatus::kNonConvergence;
}

}  // namespace

RunManifest run(const ExperimentConfig& config) {
  validate(config);
  if (config.output_dir.empty()) throw ConfigError("output_dir must be set");
  RunWriter writer(config);
  RunManifest manifest;
  manifest.version = SOFTARM_VERSION;
  const json config_doc = to_json(config);
  json hashed = config_doc;
  hashed.erase("output_dir");
  manifest.config_hash = sha256_hex(hashed.dump());
  writer.write_json("config.json", config_doc);
  manifest.timings = json::object();
  manifest.convergence = json::object();
  Clock total;
  try {
    switch (config.mode) {
      case Mode::kStaticReach:
        manifest.status = run_static_reach(config, writer, manifest);
        break;
      case Mode::kStaticGrasp:
        manifest.status = run_static_grasp(config, writer, manifest);
        break;
      case Mode::kDynamicReach:
        manifest.status = run_dynamic_reach(config, writer, manifest);
        break;
    }
  } catch (const NumericalInstability& e) {
    manifest.status = RunStatus::kInstability;
    manifest.message = e.what();
  } catch (const SingularSystem& e) {
    manifest.status = RunStatus::kInstability;
    manifest.message = e.what();
  } catch (const NonConvergence& e) {
    manifest.status = RunStatus::kNonConvergence;
    manifest.message = e.what();
  }
  if (manifest.status == RunStatus::kNonConvergence && manifest.message.empty()) {
    manifest.message = "solver stopped before meeting its tolerances; see report.json";
  }
  if (manifest.status != RunStatus::kSuccess) {
    writer.write_json("diagnostics.json",
                      {{"status", status_name(manifest.status)}, {"message", manifest.message}});
  }
  manifest.timings["total_seconds"] = total.seconds();
  manifest.files = writer.inventory();
  std::ofstream out(writer.dir() / "manifest.json");
  out << manifest.to_json().dump(2) << "\n";
  return manifest;
}

}  // namespace softarm::experiment
