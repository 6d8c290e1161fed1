#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "softarm/adjoint.hpp"
#include "softarm/grasping.hpp"
#include "softarm/params.hpp"
#include "softarm/static_solver.hpp"

namespace softarm::experiment {

enum class Mode { kStaticReach, kDynamicReach, kStaticGrasp };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

/// A parameter profile: a constant, a formula in s, or one value per grid node.
using Profile = std::variant<double, std::string, std::vector<double>>;

struct ProfileSet {
  Profile rho = 1.0;
  Profile omega = 1.0;
  Profile eps = 1.0;
  Profile nu = 0.0;
  Profile mu = 0.0;
  Profile beta = 0.0;
  Profile gamma = 0.0;
};

struct MaskSpec {
  std::vector<Interval> intervals;
  /// When set, I is everything except these points.
  std::optional<std::vector<double>> all_except;
};

struct ObjectSpec {
  /// "circle", "square" or "polygon".
  std::string shape = "circle";
  Vec2 center = Vec2::Zero();
  double radius = 0.1;
  double half_side = 0.1;
  std::vector<Vec2> vertices;
};

struct WeightSpec {
  /// Interval [lo, hi] with a density, unless `points` is set.
  double lo = 0.0;
  double hi = 1.0;
  double density = 1.0;
  std::optional<std::vector<double>> points;
};

struct SolverSpec {
  /// "auto" keeps each solver's default inner method.
  std::string inner = "auto";
  double constraint_tolerance = 1e-8;
  double stationarity_tolerance = 1e-6;
  int max_outer = 60;
  int max_inner = 400;
};

struct DynamicSpec {
  double final_time = 2.0;
  double dt = 0.001;
  int substeps = 0;
  int max_iterations = 40;
  double tolerance = 1e-4;
  /// "static" starts from the static optimal control, "zero" from u = 0.
  std::string initial_control = "static";
  /// Every k-th macro step is written to the trajectory and control files.
  int output_stride = 10;
  /// Random directions for an adjoint-vs-finite-difference check of the final gradient.
  int gradient_check_directions = 0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  Mode mode = Mode::kStaticReach;
  double ds = 0.02;
  ProfileSet profiles;
  double tau = 1e-4;
  MaskSpec mask;
  bool curvature_constraint = true;
  Vec2 target = Vec2::Zero();
  ObjectSpec object;
  WeightSpec weight;
  SolverSpec solver;
  DynamicSpec dynamic;
  std::uint64_t seed = 0;
  std::string output_dir;
};

/// Parses and validates a configuration document. Unknown keys and ill-typed values
/// throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Builds every solver input once so that all schema and sign errors surface before a
/// solve. Throws ConfigError.
void validate(const ExperimentConfig& config);

/// Named configurations for Tests 1-8 and "test2-dynamic".
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

Grid make_grid(const ExperimentConfig& config);
ScalarField sample_profile(const Profile& profile, const Grid& grid, const char* name);
ModelParams make_params(const ExperimentConfig& config);
ActuationMask make_mask(const ExperimentConfig& config);
GraspTarget make_object(const ExperimentConfig& config);
GraspWeight make_weight(const ExperimentConfig& config);
AugmentedLagrangianOptions make_solver_options(const ExperimentConfig& config,
                                               InnerMethod fallback);

}  // namespace softarm::experiment
