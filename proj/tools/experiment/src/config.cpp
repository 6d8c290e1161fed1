#include "softarm/experiment/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "softarm/elastica.hpp"
#include "softarm/errors.hpp"
#include "softarm/experiment/expression.hpp"

namespace softarm::experiment {

using nlohmann::json;

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::kStaticReach:
      return "static-reach";
    case Mode::kDynamicReach:
      return "dynamic-reach";
    case Mode::kStaticGrasp:
      return "static-grasp";
  }
  return "static-reach";
}

Mode mode_from_string(const std::string& name) {
  if (name == "static-reach") return Mode::kStaticReach;
  if (name == "dynamic-reach") return Mode::kDynamicReach;
  if (name == "static-grasp") return Mode::kStaticGrasp;
  throw ConfigError("unknown mode '" + name + "' (expected static-reach, dynamic-reach or static-grasp)");
}

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T read(const json& obj, const std::string& key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + key + "' in " + where + " has the wrong type");
  }
}

double read_number(const json& obj, const std::string& key, const std::string& where,
                   double fallback) {
  if (obj.contains(key) && !obj.at(key).is_number()) {
    throw ConfigError("'" + key + "' in " + where + " must be a number");
  }
  return read<double>(obj, key, where, fallback);
}

Vec2 read_point(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
    throw ConfigError(where + " must be a two-element numeric array");
  }
  return {value[0].get<double>(), value[1].get<double>()};
}

std::vector<double> read_numbers(const json& value, const std::string& where) {
  if (!value.is_array()) throw ConfigError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const json& v : value) {
    if (!v.is_number()) throw ConfigError(where + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Profile read_profile(const json& value, const std::string& name) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string text = value.get<std::string>();
    Expression::parse(text);
    return text;
  }
  if (value.is_array()) return read_numbers(value, "profile " + name);
  throw ConfigError("profile " + name + " must be a number, a formula or an array");
}

json profile_json(const Profile& p) {
  return std::visit([](const auto& v) { return json(v); }, p);
}

json point_json(const Vec2& p) { return json::array({p.x(), p.y()}); }

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  check_keys(doc,
             {"name", "mode", "grid", "profiles", "tau", "mask", "curvature_constraint",
              "target", "object", "grasp_weight", "solver", "dynamic", "seed", "output_dir"},
             "config");
  ExperimentConfig c;
  c.name = read<std::string>(doc, "name", "config", c.name);
  c.mode = mode_from_string(read<std::string>(doc, "mode", "config", to_string(c.mode)));

  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    check_keys(g, {"ds"}, "grid");
    c.ds = read_number(g, "ds", "grid", c.ds);
  }

  if (doc.contains("profiles")) {
    const json& p = doc.at("profiles");
    check_keys(p, {"rho", "omega", "eps", "nu", "mu", "beta", "gamma"}, "profiles");
    auto take = [&](const char* key, Profile& out) {
      if (p.contains(key)) out = read_profile(p.at(key), key);
    };
    take("rho", c.profiles.rho);
    take("omega", c.profiles.omega);
    take("eps", c.profiles.eps);
    take("nu", c.profiles.nu);
    take("mu", c.profiles.mu);
    take("beta", c.profiles.beta);
    take("gamma", c.profiles.gamma);
  }
  c.tau = read_number(doc, "tau", "config", c.tau);

  if (doc.contains("mask")) {
    const json& m = doc.at("mask");
    check_keys(m, {"intervals", "all_except"}, "mask");
    if (m.contains("intervals") && m.contains("all_except")) {
      throw ConfigError("mask takes either 'intervals' or 'all_except'");
    }
    if (m.contains("intervals")) {
      const json& list = m.at("intervals");
      if (!list.is_array()) throw ConfigError("mask intervals must be an array");
      for (const json& iv : list) {
        const Vec2 lh = read_point(iv, "mask interval");
        c.mask.intervals.push_back({lh.x(), lh.y()});
      }
    }
    if (m.contains("all_except")) c.mask.all_except = read_numbers(m.at("all_except"), "mask all_except");
  }
  c.curvature_constraint =
      read<bool>(doc, "curvature_constraint", "config", c.curvature_constraint);

  if (doc.contains("target")) c.target = read_point(doc.at("target"), "target");

  if (doc.contains("object")) {
    const json& o = doc.at("object");
    check_keys(o, {"shape", "center", "radius", "half_side", "vertices"}, "object");
    c.object.shape = read<std::string>(o, "shape", "object", c.object.shape);
    if (o.contains("center")) c.object.center = read_point(o.at("center"), "object center");
    c.object.radius = read_number(o, "radius", "object", c.object.radius);
    c.object.half_side = read_number(o, "half_side", "object", c.object.half_side);
    if (o.contains("vertices")) {
      const json& list = o.at("vertices");
      if (!list.is_array()) throw ConfigError("object vertices must be an array");
      for (const json& v : list) c.object.vertices.push_back(read_point(v, "object vertex"));
    }
  }

  if (doc.contains("grasp_weight")) {
    const json& w = doc.at("grasp_weight");
    check_keys(w, {"interval", "density", "points"}, "grasp_weight");
    if (w.contains("interval") && w.contains("points")) {
      throw ConfigError("grasp_weight takes either 'interval' or 'points'");
    }
    if (w.contains("interval")) {
      const Vec2 lh = read_point(w.at("interval"), "grasp_weight interval");
      c.weight.lo = lh.x();
      c.weight.hi = lh.y();
    }
    c.weight.density = read_number(w, "density", "grasp_weight", c.weight.density);
    if (w.contains("points")) c.weight.points = read_numbers(w.at("points"), "grasp_weight points");
  }

  if (doc.contains("solver")) {
    const json& s = doc.at("solver");
    check_keys(s,
               {"inner", "constraint_tolerance", "stationarity_tolerance", "max_outer",
                "max_inner"},
               "solver");
    c.solver.inner = read<std::string>(s, "inner", "solver", c.solver.inner);
    c.solver.constraint_tolerance =
        read_number(s, "constraint_tolerance", "solver", c.solver.constraint_tolerance);
    c.solver.stationarity_tolerance =
        read_number(s, "stationarity_tolerance", "solver", c.solver.stationarity_tolerance);
    c.solver.max_outer = read<int>(s, "max_outer", "solver", c.solver.max_outer);
    c.solver.max_inner = read<int>(s, "max_inner", "solver", c.solver.max_inner);
  }

  if (doc.contains("dynamic")) {
    const json& d = doc.at("dynamic");
    check_keys(d,
               {"final_time", "dt", "substeps", "max_iterations", "tolerance", "initial_control",
                "output_stride", "gradient_check_directions"},
               "dynamic");
    DynamicSpec& ds = c.dynamic;
    ds.final_time = read_number(d, "final_time", "dynamic", ds.final_time);
    ds.dt = read_number(d, "dt", "dynamic", ds.dt);
    ds.substeps = read<int>(d, "substeps", "dynamic", ds.substeps);
    ds.max_iterations = read<int>(d, "max_iterations", "dynamic", ds.max_iterations);
    ds.tolerance = read_number(d, "tolerance", "dynamic", ds.tolerance);
    ds.initial_control = read<std::string>(d, "initial_control", "dynamic", ds.initial_control);
    ds.output_stride = read<int>(d, "output_stride", "dynamic", ds.output_stride);
    ds.gradient_check_directions =
        read<int>(d, "gradient_check_directions", "dynamic", ds.gradient_check_directions);
  }

  c.seed = read<std::uint64_t>(doc, "seed", "config", c.seed);
  c.output_dir = read<std::string>(doc, "output_dir", "config", c.output_dir);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json doc;
  doc["name"] = c.name;
  doc["mode"] = to_string(c.mode);
  doc["grid"] = {{"ds", c.ds}};
  doc["profiles"] = {
      {"rho", profile_json(c.profiles.rho)},     {"omega", profile_json(c.profiles.omega)},
      {"eps", profile_json(c.profiles.eps)},     {"nu", profile_json(c.profiles.nu)},
      {"mu", profile_json(c.profiles.mu)},       {"beta", profile_json(c.profiles.beta)},
      {"gamma", profile_json(c.profiles.gamma)},
  };
  doc["tau"] = c.tau;
  json mask = json::object();
  if (c.mask.all_except) {
    mask["all_except"] = *c.mask.all_except;
  } else {
    json list = json::array();
    for (const Interval& iv : c.mask.intervals) list.push_back({iv.lo, iv.hi});
    mask["intervals"] = list;
  }
  doc["mask"] = mask;
  doc["curvature_constraint"] = c.curvature_constraint;
  if (c.mode == Mode::kStaticGrasp) {
    json o = {{"shape", c.object.shape}, {"center", point_json(c.object.center)}};
    if (c.object.shape == "circle") o["radius"] = c.object.radius;
    if (c.object.shape == "square") o["half_side"] = c.object.half_side;
    if (c.object.shape == "polygon") {
      json v = json::array();
      for (const Vec2& p : c.object.vertices) v.push_back(point_json(p));
      o["vertices"] = v;
      o.erase("center");
    }
    doc["object"] = o;
    json w = json::object();
    if (c.weight.points) {
      w["points"] = *c.weight.points;
    } else {
      w["interval"] = {c.weight.lo, c.weight.hi};
      w["density"] = c.weight.density;
    }
    doc["grasp_weight"] = w;
  } else {
    doc["target"] = point_json(c.target);
  }
  doc["solver"] = {
      {"inner", c.solver.inner},
      {"constraint_tolerance", c.solver.constraint_tolerance},
      {"stationarity_tolerance", c.solver.stationarity_tolerance},
      {"max_outer", c.solver.max_outer},
      {"max_inner", c.solver.max_inner},
  };
  if (c.mode == Mode::kDynamicReach) {
    const DynamicSpec& d = c.dynamic;
    doc["dynamic"] = {
        {"final_time", d.final_time},
        {"dt", d.dt},
        {"substeps", d.substeps},
        {"max_iterations", d.max_iterations},
        {"tolerance", d.tolerance},
        {"initial_control", d.initial_control},
        {"output_stride", d.output_stride},
        {"gradient_check_directions", d.gradient_check_directions},
    };
  }
  doc["seed"] = c.seed;
  doc["output_dir"] = c.output_dir;
  return doc;
}

Grid make_grid(const ExperimentConfig& config) { return Grid::from_spacing(config.ds); }

ScalarField sample_profile(const Profile& profile, const Grid& grid, const char* name) {
  if (const double* v = std::get_if<double>(&profile)) {
    return ScalarField::Constant(grid.size(), *v);
  }
  if (const std::string* text = std::get_if<std::string>(&profile)) {
    return Expression::parse(*text).sample(grid);
  }
  const auto& table = std::get<std::vector<double>>(profile);
  if (static_cast<int>(table.size()) != grid.size()) {
    throw ConfigError(std::string("tabulated profile ") + name + " has " +
                      std::to_string(table.size()) + " values, grid has " +
                      std::to_string(grid.size()) + " nodes");
  }
  return Eigen::Map<const ScalarField>(table.data(), grid.size());
}

ModelParams make_params(const ExperimentConfig& config) {
  const Grid grid = make_grid(config);
  ModelParams p(grid);
  p.rho = sample_profile(config.profiles.rho, grid, "rho");
  p.omega = sample_profile(config.profiles.omega, grid, "omega");
  p.eps = sample_profile(config.profiles.eps, grid, "eps");
  p.nu = sample_profile(config.profiles.nu, grid, "nu");
  p.mu = sample_profile(config.profiles.mu, grid, "mu");
  p.beta = sample_profile(config.profiles.beta, grid, "beta");
  p.gamma = sample_profile(config.profiles.gamma, grid, "gamma");
  p.tau = config.tau;
  p.validate();
  return p;
}

ActuationMask make_mask(const ExperimentConfig& config) {
  if (config.mask.all_except) return ActuationMask::all_except(*config.mask.all_except);
  return ActuationMask::from_intervals(config.mask.intervals);
}

GraspTarget make_object(const ExperimentConfig& config) {
  const ObjectSpec& o = config.object;
  if (o.shape == "circle") return GraspTarget(Circle{o.center, o.radius});
  if (o.shape == "square") return GraspTarget(Square{o.center, o.half_side});
  if (o.shape == "polygon") return GraspTarget(ConvexPolygon{o.vertices});
  throw ConfigError("unknown object shape '" + o.shape + "'");
}

GraspWeight make_weight(const ExperimentConfig& config) {
  if (config.weight.points) return GraspWeight::points(*config.weight.points);
  return GraspWeight::interval(config.weight.lo, config.weight.hi, config.weight.density);
}

AugmentedLagrangianOptions make_solver_options(const ExperimentConfig& config,
                                               InnerMethod fallback) {
  AugmentedLagrangianOptions o;
  const SolverSpec& s = config.solver;
  if (s.inner == "bfgs") {
    o.inner_method = InnerMethod::kBfgs;
  } else if (s.inner == "newton") {
    o.inner_method = InnerMethod::kNewton;
  } else if (s.inner == "auto") {
    o.inner_method = fallback;
  } else {
    throw ConfigError("solver inner must be auto, bfgs or newton");
  }
  o.constraint_tolerance = s.constraint_tolerance;
  o.stationarity_tolerance = s.stationarity_tolerance;
  o.max_outer_iterations = s.max_outer;
  o.max_inner_iterations = s.max_inner;
  return o;
}

void validate(const ExperimentConfig& c) {
  if (c.name.empty()) throw ConfigError("name must not be empty");
  const ModelParams params = make_params(c);
  const ActuationMask mask = make_mask(c);
  make_solver_options(c, InnerMethod::kBfgs);
  if (!(c.solver.constraint_tolerance > 0.0) || !(c.solver.stationarity_tolerance > 0.0)) {
    throw ConfigError("solver tolerances must be positive");
  }
  if (c.solver.max_outer < 1 || c.solver.max_inner < 1) {
    throw ConfigError("solver iteration caps must be positive");
  }
  if (c.mode == Mode::kDynamicReach) {
    const DynamicSpec& d = c.dynamic;
    if (!(d.dt > 0.0) || !(d.final_time > 0.0)) {
      throw ConfigError("dynamic dt and final_time must be positive");
    }
    const double steps = d.final_time / d.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
      throw ConfigError("final_time must be an integer multiple of dt");
    }
    if (d.substeps < 0 || d.max_iterations < 0 || d.output_stride < 1 ||
        d.gradient_check_directions < 0 || !(d.tolerance > 0.0)) {
      throw ConfigError("dynamic options out of range");
    }
    if (d.initial_control != "static" && d.initial_control != "zero") {
      throw ConfigError("initial_control must be 'static' or 'zero'");
    }
  }
  try {
    const StaticProblem problem =
        c.mode == Mode::kStaticGrasp
            ? GraspProblem(params, mask, make_object(c), make_weight(c), c.curvature_constraint)
                  .base()
            : StaticProblem(params, mask, c.target, c.curvature_constraint);
    ElasticaProblem(problem.grid(), problem.omega_bar(), problem.deactivated(), {},
                    c.curvature_constraint);
  } catch (const IllPosedProblem& e) {
    throw ConfigError(e.what());
  }
}

namespace {

ExperimentConfig global_settings(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.ds = 0.02;
  c.profiles.eps = "10⁻¹(1−0.9s)";
  c.profiles.mu = "(1−s)exp(−0.1s²/(1−s²))";
  c.profiles.omega = "4π(1+s²)";
  c.profiles.rho = "exp(−s)";
  c.profiles.nu = "10⁻³(1−0.09s)";
  c.profiles.beta = "2−s";
  c.profiles.gamma = "10⁻⁶(2−s)";
  c.tau = 1e-4;
  c.target = Vec2(0.3563, -0.4423);
  c.output_dir = "softarm-out/" + name;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"test1", "test2", "test3", "test4", "test5",
          "test6", "test7", "test8", "test2-dynamic"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c = global_settings(name);
  constexpr double kS0 = 0.55;
  constexpr double kR0 = 0.1;
  if (name == "test1") {
  } else if (name == "test2") {
    c.mask.intervals = {{0.35, 0.65}};
  } else if (name == "test3") {
    c.mask.intervals = {{0.25, 0.4}, {0.6, 0.75}};
  } else if (name == "test4") {
    c.mask.all_except = std::vector<double>{0.0, 0.25, 0.5, 0.75};
    c.curvature_constraint = false;
  } else if (name == "test5" || name == "test6" || name == "test7" || name == "test8") {
    c.mode = Mode::kStaticGrasp;
    const bool circle = name == "test5" || name == "test6";
    c.object.shape = circle ? "circle" : "square";
    c.object.center = c.target;
    c.object.radius = kR0;
    c.object.half_side = kR0;
    if (name == "test5" || name == "test7") {
      c.weight.lo = kS0;
      c.weight.hi = 1.0;
    } else if (name == "test6") {
      c.weight.points = std::vector<double>{kS0, 1.0};
    } else {
      c.weight.points = std::vector<double>{kS0, 0.5 * (kS0 + 1.0), 1.0};
    }
    c.curvature_constraint = name != "test7";
  } else if (name == "test2-dynamic") {
    c.mode = Mode::kDynamicReach;
    c.mask.intervals = {{0.35, 0.65}};
    c.dynamic.final_time = 2.0;
    c.dynamic.dt = 0.001;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  validate(c);
  return c;
}

}  // namespace softarm::experiment
