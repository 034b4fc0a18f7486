#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "oscine/toml_lite.hpp"

namespace oscine {

/// Parameters shared by the registered experiments; each experiment reads
/// the subset it needs. Defaults reproduce the shipped configs.
struct ExperimentConfig {
  std::string name;

  // system
  double nu = 1.0;
  double kappa = 0.5;
  double iota = 1.0;
  double lambda = 0.3;
  double a = 2.0;
  double s = 1.0;
  std::vector<double> omega;  // empty: experiment picks its default
  double gamma = 0.2;
  double tau = 1.05;

  // numerics
  int n0 = 256;
  int n_max = 65536;
  double dt = 1e-2;
  int grid_m = 8192;
  double window_lo = -80.0;
  double window_hi = 80.0;
  double T = 0.0;          // 0: experiment default
  double sample_dt = 0.0;  // 0: experiment default

  std::string out_dir = "out";
  std::uint64_t seed = 20240817ULL;

  void validate() const;
  static ExperimentConfig from_toml(const TomlLite& toml);
  nlohmann::json to_json() const;
};

struct ExperimentOutcome {
  int exit_code = 0;  // 0 pass, 2 acceptance failure, 1 error
  std::string message;
};

const std::vector<std::string>& registered_experiments();
std::string experiment_help(const std::string& name);

/// Runs one experiment, writing CSV series, report.json and manifest.json
/// under config.out_dir. Deterministic for a fixed config and seed.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace oscine
