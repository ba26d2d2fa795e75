#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relpush/config.hpp"
#include "relpush/oracles.hpp"

namespace relpush {

struct Sample {
  double t = 0.0;
  Vec3 r, u;
  double gamma = 1.0;
  double kinetic_energy = 0.0;
  std::optional<double> potential_energy;
  double total_energy = 0.0;
  std::optional<double> error;  // |r - r_oracle| when a closed form exists
  bool warmup = false;
  int corrector_iterations = 0;
};

struct TimeSeries {
  std::string method;
  std::string scenario;
  std::vector<Sample> samples;
};

TimeSeries run_simulation(const ExperimentConfig& cfg);

// Oracle positions at every sample time: closed form when available,
// otherwise the fine-step reference on the same grid.
std::vector<Vec3> oracle_positions(const ExperimentConfig& cfg, const TimeSeries& traj);

struct ErrorNorm {
  double value = 0.0;
  bool absolute = false;  // oracle positions all zero, so no relative scale
};

// sqrt(sum |r - r*|^2) / sqrt(sum |r*|^2) over non-warm-up samples.
ErrorNorm error_norm_detail(const TimeSeries& traj, const std::vector<Vec3>& oracle);
double error_norm(const TimeSeries& traj, const std::vector<Vec3>& oracle);

struct EnergyWindow {
  double start_t;
  double end_t;
};

struct EnergyDrift {
  double relative_range = 0.0;  // (max - min) / |initial|
  double net = 0.0;             // (last - initial) / |initial|
  bool uses_total = false;      // total energy when a potential exists, else kinetic
  int samples = 0;
};

EnergyDrift energy_drift_detail(const TimeSeries& traj, EnergyWindow window);
double energy_drift(const TimeSeries& traj, EnergyWindow window);

// Max |gamma - gamma_0| / gamma_0 over the window.
double gamma_drift(const TimeSeries& traj, EnergyWindow window);

// Earliest window start excluding warm-up samples.
double first_post_warmup_time(const TimeSeries& traj);

struct ConvergenceRow {
  double dt = 0.0;
  int steps = 0;
  double error = 0.0;
  bool in_fit = false;
};

enum class FitStatus { Ok, TooFewPoints, AllPointsAtFloor };
const char* to_string(FitStatus s);

struct ConvergenceTable {
  std::string method;
  std::string scenario;
  OracleKind oracle = OracleKind::FineStepReference;
  std::vector<ConvergenceRow> rows;  // dt descending
  double floor = 1e-12;
  double fitted_slope = 0.0;
  FitStatus status = FitStatus::TooFewPoints;
  std::vector<int> fit_window;
};

inline constexpr double kConvergenceFloor = 1e-12;

// Slope of log(error) against log(dt) over rows with error > 10 * floor.
void fit_convergence(ConvergenceTable& table);

// Runs the config at every dt in dt_sweep. jobs > 1 runs entries on threads.
ConvergenceTable convergence_study(const ExperimentConfig& cfg, int jobs = 1);

}  // namespace relpush
