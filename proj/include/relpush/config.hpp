#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relpush/fields.hpp"
#include "relpush/kinematics.hpp"
#include "relpush/pushers.hpp"

namespace relpush {

struct CoefficientSource {
  int k = 22;
  double rho = 3.15;
  int rank = 18;
  double svd_tol = 1e-12;
  std::optional<std::filesystem::path> file;  // resolved against the config's directory
};

struct OutputPaths {
  std::optional<std::filesystem::path> trajectory_csv;
  std::optional<std::filesystem::path> energy_csv;
  std::optional<std::filesystem::path> convergence_csv;
};

struct ExperimentConfig {
  std::string name;
  UnitsSystem units;
  Species species;
  FieldScenario scenario;
  ParticleState initial;
  PusherConfig pusher;
  CoefficientSource coeff_source;
  double t_end = 1.0;
  std::vector<double> dt_sweep;
  std::optional<double> sweep_t_end;  // t_end used by convergence runs, if different
  std::optional<std::array<double, 2>> energy_window;
  OutputPaths outputs;
};

// Parses a config document. Relative coefficient paths resolve against base_dir.
ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config_file(const std::filesystem::path& path);

// Throws Validation on inconsistent settings.
void validate(const ExperimentConfig& cfg);

// Builds or loads exp coefficients when the method needs them and they are missing.
void ensure_coefficients(ExperimentConfig& cfg);

// Copy of cfg bound to another method, with coefficients ready.
ExperimentConfig with_method(const ExperimentConfig& cfg, Method m);

// Number of steps covering [t0, t_end] at dt (the last step may overshoot).
int steps_for(double span, double dt);

}  // namespace relpush
