#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "relpush/fields.hpp"
#include "relpush/kinematics.hpp"

namespace relpush {

enum class OracleKind { LinearAccel, Cyclotron, CrossedEB, FineStepReference };

const char* to_string(OracleKind kind);

// Displacement along E for a particle starting with u = c*sqrt(gamma0^2-1) along E.
double linear_accel_position(double t, double Emag, const Species& sp, double gamma0,
                             const UnitsSystem& units);

// Orbit in B = Bmag z_hat starting at the origin with u along +x.
Vec3 cyclotron_position(double t, double Bmag, const Species& sp, double v0, double gamma0,
                        const UnitsSystem& units);

// E = y_hat, B = z_hat, q = m = c = 1, from rest at the origin.
Vec3 crossed_field_position(double t);
double crossed_field_u_param(double t);  // U(t), with u = (U^2/2, U, 0)

// Closed-form solutions bound to concrete initial conditions. Each is valid
// for t before the initial time as well, which the history seeding relies on.
struct LinearAccelOracle {
  Vec3 r0;
  Vec3 dir;        // unit vector along E
  double s0 = 0;   // initial u along dir
  double t0 = 0;
  double rate = 0; // q|E|/m
  double c = 1;
  ParticleState at(double t) const;
};

struct CyclotronOracle {
  Vec3 r0, u0;
  double t0 = 0;
  double omega = 0;  // signed q Bz / (gamma m)
  double gamma = 1;
  ParticleState at(double t) const;
};

struct CrossedEBOracle {
  Vec3 r0;
  double t0 = 0;
  ParticleState at(double t) const;
};

using AnalyticOracle = std::variant<LinearAccelOracle, CyclotronOracle, CrossedEBOracle>;

OracleKind oracle_kind(const AnalyticOracle& o);
ParticleState oracle_state(const AnalyticOracle& o, double t);

// The closed form matching the scenario and initial state, if there is one:
// UniformE with u parallel to E, UniformB along z, or the unit crossed-field
// configuration from rest.
std::optional<AnalyticOracle> analytic_oracle_for(const FieldScenario& s, const Species& sp,
                                                  const UnitsSystem& units,
                                                  const ParticleState& initial);

struct ReferenceTrajectory {
  std::vector<ParticleState> samples;
  double dt_ref = 0.0;
  double halving_agreement = 0.0;  // max relative deviation from the dt_ref/2 run
  bool halving_checked = false;
};

// Fine-step RK4 sampled at n_samples uniform times from initial.t to t_end
// inclusive, with dt_ref = spacing / substeps. With check_halving the run is
// repeated at dt_ref/2 and must agree to `agreement_tol` relative.
ReferenceTrajectory reference_trajectory(const FieldScenario& s, const Species& sp,
                                         const UnitsSystem& units, const ParticleState& initial,
                                         double t_end, int n_samples, bool check_halving = true,
                                         int substeps = 1000, double agreement_tol = 1e-10);

}  // namespace relpush
