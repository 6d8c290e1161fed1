#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "softarm/acceptance/criteria.hpp"
#include "softarm/errors.hpp"
#include "softarm/experiment/config.hpp"
#include "softarm/experiment/run.hpp"

namespace {

using softarm::experiment::ExperimentConfig;
using softarm::experiment::Mode;

constexpr int kConfigErrorExit = 2;

struct Overrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_iters;
  std::optional<double> tolerance;
};

void apply(const Overrides& o, ExperimentConfig& config) {
  if (o.output_dir) config.output_dir = *o.output_dir;
  if (o.seed) config.seed = *o.seed;
  if (config.mode == Mode::kDynamicReach) {
    if (o.max_iters) config.dynamic.max_iterations = *o.max_iters;
    if (o.tolerance) config.dynamic.tolerance = *o.tolerance;
  } else {
    if (o.max_iters) config.solver.max_outer = *o.max_iters;
    if (o.tolerance) config.solver.stationarity_tolerance = *o.tolerance;
  }
}

int execute(ExperimentConfig config, const Overrides& overrides) {
  apply(overrides, config);
  const softarm::experiment::RunManifest manifest = softarm::experiment::run(config);
  const int code = softarm::experiment::exit_code(manifest.status);
  std::cout << config.name << ": " << manifest.to_json()["status"].get<std::string>() << " -> "
            << config.output_dir << "\n";
  if (!manifest.message.empty()) std::cerr << manifest.message << "\n";
  return code;
}

int verify(const std::string& selector) {
  const auto selected = softarm::acceptance::select(selector);
  if (selected.empty()) {
    throw softarm::ConfigError("unknown acceptance fixture '" + selector + "'");
  }
  bool all_passed = true;
  for (const auto* criterion : selected) {
    const auto result = softarm::acceptance::run(*criterion);
    std::cout << softarm::acceptance::format(result) << std::endl;
    all_passed = all_passed && result.passed;
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal control of a planar inextensible soft manipulator"};
  app.require_subcommand(1);

  Overrides overrides;
  auto add_overrides = [&overrides](CLI::App* cmd) {
    cmd->add_option_function<std::string>(
        "--output-dir", [&overrides](const std::string& v) { overrides.output_dir = v; },
        "Directory receiving the run outputs");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&overrides](const std::uint64_t& v) { overrides.seed = v; },
        "Seed for randomized diagnostics");
    cmd->add_option_function<int>(
        "--max-iters", [&overrides](const int& v) { overrides.max_iters = v; },
        "Outer iteration cap (dynamic: optimizer iterations)");
    cmd->add_option_function<double>(
        "--tolerance", [&overrides](const double& v) { overrides.tolerance = v; },
        "Stationarity tolerance (dynamic: projected-gradient tolerance)");
  };

  std::string config_path;
  CLI::App* run_cmd = app.add_subcommand("run", "Solve the experiment described by a config file");
  run_cmd->add_option("config", config_path, "JSON configuration")->required();
  add_overrides(run_cmd);

  std::string preset_name;
  bool emit_config = false;
  CLI::App* preset_cmd =
      app.add_subcommand("preset", "Run a named preset, or print its configuration");
  preset_cmd->add_option("name", preset_name, "test1..test8 or test2-dynamic")->required();
  preset_cmd->add_flag("--emit-config", emit_config, "Print the configuration and exit");
  add_overrides(preset_cmd);

  std::string fixture;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run acceptance checks");
  verify_cmd->add_option("fixture", fixture, "all, a number 1-14, acNN or a fixture key")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigErrorExit;
  }

  try {
    if (*run_cmd) return execute(softarm::experiment::load_config(config_path), overrides);
    if (*preset_cmd) {
      ExperimentConfig config = softarm::experiment::preset(preset_name);
      if (emit_config) {
        apply(overrides, config);
        std::cout << softarm::experiment::to_json(config).dump(2) << "\n";
        return 0;
      }
      return execute(config, overrides);
    }
    if (*verify_cmd) return verify(fixture);
  } catch (const softarm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigErrorExit;
  } catch (const softarm::IllPosedProblem& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigErrorExit;
  } catch (const softarm::SizingError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigErrorExit;
  } catch (const softarm::NumericalInstability& e) {
    std::cerr << "numerical instability: " << e.what() << "\n";
    return 4;
  } catch (const softarm::SingularSystem& e) {
    std::cerr << "numerical instability: " << e.what() << "\n";
    return 4;
  } catch (const softarm::NonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
