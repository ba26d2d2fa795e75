#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "relpush/exp_coefficients.hpp"
#include "relpush/fields.hpp"
#include "relpush/history.hpp"
#include "relpush/kinematics.hpp"

namespace relpush {

enum class Method { Boris, AdamsPC3, AdamsPC4, ExponentialPC, RK4Reference };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

struct PusherConfig {
  Method method = Method::Boris;
  double dt = 0.1;
  double corrector_tol = 1e-9;
  int max_correctors = 10;
  std::shared_ptr<const ExpPcCoefficients> exp_coeffs;
};

void validate(const PusherConfig& cfg);

// Number of stored samples the method steps from (1 for one-step methods).
int history_length(const PusherConfig& cfg);

// Linear multistep predictor/corrector pair, weights stored oldest first so
// they line up with StateHistory windows.
struct MultistepStencil {
  int k = 0;
  std::vector<double> pred_value, pred_deriv;
  std::vector<double> corr_value, corr_deriv;  // history part of the corrector
  double corr_deriv_new = 0.0;                 // weight on the derivative at the new point

  static MultistepStencil adams(int order);
  static MultistepStencil exponential(const ExpPcCoefficients& c);
};

struct StepStats {
  int corrector_iterations = 0;
};

HistoryEntry evaluate(const ParticleState& st, const FieldScenario& s, const Species& sp,
                      const UnitsSystem& units);

ParticleState boris_step(const ParticleState& state, const FieldScenario& s, const Species& sp,
                         const UnitsSystem& units, double dt);

ParticleState rk4_reference_step(const ParticleState& state, const FieldScenario& s,
                                 const Species& sp, const UnitsSystem& units, double dt);

// PE(CE)^m step from a full history; pushes the accepted sample.
ParticleState multistep_step(StateHistory& hist, const MultistepStencil& st, const FieldScenario& s,
                             const Species& sp, const UnitsSystem& units, const PusherConfig& cfg,
                             StepStats* stats = nullptr);

ParticleState adams_pc_step(StateHistory& hist, const FieldScenario& s, const Species& sp,
                            const UnitsSystem& units, const PusherConfig& cfg,
                            StepStats* stats = nullptr);

ParticleState exp_pc_step(StateHistory& hist, const FieldScenario& s, const Species& sp,
                          const UnitsSystem& units, const PusherConfig& cfg,
                          StepStats* stats = nullptr);

struct Bootstrap {
  StateHistory history;
  // Grid states from initial.t up to the newest history sample, when they
  // come from the reference integrator (warm-up); empty for exact seeding.
  std::vector<ParticleState> warmup;
  bool from_oracle = false;
};

inline constexpr int kBootstrapSubsteps = 1000;

// Seeds a k-sample history. With a closed-form solution the samples sit at
// t0-(k-1)dt..t0. Otherwise RK4 at dt/1000 runs forward from t0 and the
// history covers t_s..t_s+(k-1)dt, where t_s is t0 or, if the fields switch
// off later (bottle kick), the first grid time at or after the switch.
Bootstrap bootstrap_history(const FieldScenario& s, const Species& sp, const UnitsSystem& units,
                            const PusherConfig& cfg, const ParticleState& initial, int k);

}  // namespace relpush
