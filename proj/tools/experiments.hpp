#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "trajent/types.hpp"

namespace trajent::experiments {

/// Bad config file, unknown experiment, invalid values. Maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrajectorySettings {
  double dt_bar = 0.0;         // 0 = per-unraveling default
  double t_transient = 20.0;
  double t_total = 2000.0;
  double sample_interval = 0.1;
  int n_traj = 8;
};

/// Fully resolved run description. The manifest echoes every field, and a
/// manifest can be fed back through --config to reproduce a run bit for bit.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 20250810ull;
  int jobs = 0;                // 0 = hardware concurrency
  std::string out_dir = "out";

  double omega_bar = 1.0;
  double gamma_b_bar = 0.5;
  int n_max = 0;               // 0 = auto from omega_bar

  std::vector<double> gamma_a_grid;          // main sweep axis
  std::vector<double> surface_gamma_a_grid;  // fig1(e)/fig3(a) surfaces
  std::vector<double> gamma_b_grid;          // fig1(e)
  std::vector<double> omega_grid;            // fig3(a)
  std::vector<double> theta_grid;            // fig3(b)

  TrajectorySettings traj;
  int n_phi = 64;

  int wigner_points = 121;
  double wigner_margin = 3.0;

  // validate
  int validate_m_traj = 500;
  double validate_t_relax = 30.0;
  double validate_jump_a_scale = 1.0;  // mutation hook; 1 = physical

  // scaling report
  std::vector<double> scaling_small_gamma_a;
  std::vector<double> scaling_large_gamma_a;
  double scaling_large_gamma_b = 2.0;
  int scaling_large_n_max = 14;
};

extern const std::vector<std::string> kExperiments;

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Fills experiment-specific grid defaults for empty fields and validates.
void resolve_defaults(ExperimentConfig& cfg);

struct CheckResult {
  std::string name;
  bool passed = false;
  double metric = 0.0;
  double tolerance = 0.0;
  std::string details;
};

struct RunOutcome {
  bool validation_passed = true;       // false only for failed validate runs
  std::vector<std::string> files;      // paths written, relative to out_dir
  std::vector<CheckResult> checks;     // validate only
};

RunOutcome run_experiment(const ExperimentConfig& cfg);

RunOutcome run_fig1(const ExperimentConfig& cfg);
RunOutcome run_fig2(const ExperimentConfig& cfg);
RunOutcome run_fig2c(const ExperimentConfig& cfg);
RunOutcome run_fig3(const ExperimentConfig& cfg);
RunOutcome run_validate(const ExperimentConfig& cfg);
RunOutcome run_scaling(const ExperimentConfig& cfg);

/// 17-significant-digit float serialization used by every CSV column.
std::string format_float(double v);

/// Inverse of the binary entropy on [0, 1/2].
double binary_entropy_inverse(double e);

}  // namespace trajent::experiments
