#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "softarm/experiment/config.hpp"

namespace softarm::experiment {

enum class RunStatus { kSuccess, kNonConvergence, kInstability };

/// Process exit code: 0 success, 3 solver non-convergence, 4 numerical instability.
/// Configuration errors (exit code 2) are raised as ConfigError before a run starts.
int exit_code(RunStatus status);

struct OutputFile {
  std::string path;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  /// SHA-256 of config.json without the output_dir entry.
  std::string config_hash;
  std::string version;
  RunStatus status = RunStatus::kSuccess;
  std::string message;
  nlohmann::json timings;
  nlohmann::json convergence;
  std::vector<OutputFile> files;

  nlohmann::json to_json() const;
};

/// Solves the configured experiment and writes into `config.output_dir`:
///   config.json   the effective configuration
///   curve.csv     s, q_x, q_y, kappa, omega_bar, u
///   report.json   solver diagnostics and cost components
///   plot.gp       gnuplot script rendering figure.png from the CSV files
/// plus object.csv (static-grasp) and static_curve.csv, energy.csv, energy_static.csv,
/// trajectory.csv, control.csv (dynamic-reach). manifest.json lists every file with its
/// SHA-256. Solver failures still write the diagnostics and are reported in the status.
RunManifest run(const ExperimentConfig& config);

/// Lowercase hex SHA-256 of a byte string or of a file's contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Shortest round-trip decimal form; identical inputs give identical text.
std::string format_number(double value);

}  // namespace softarm::experiment
