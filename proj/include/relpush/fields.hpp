#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <variant>

#include "relpush/kinematics.hpp"

namespace relpush {

struct UniformE {
  Vec3 E0{1.0, 0.0, 0.0};
};

struct UniformB {
  Vec3 B0{0.0, 0.0, 1.0};
};

struct CrossedEB {
  Vec3 E0{0.0, 1.0, 0.0};
  Vec3 B0{0.0, 0.0, 1.0};
};

// phi = phi_coeff * rho, B = b_coeff * rho * z_hat, rho the cylindrical radius.
struct RadialWell {
  double phi_coeff = 0.01;
  double b_coeff = 1.0;
};

// Two magnetic dipoles plus a uniform electric kick active for t < kick_duration.
struct MagneticBottle {
  Vec3 moment{0.0, 0.0, 1e5};
  std::array<Vec3, 2> dipole_positions{Vec3{0.0, 0.0, 10.0}, Vec3{0.0, 0.0, -10.0}};
  Vec3 kick_E{0.0, 1e3, 0.0};
  double kick_duration = 10e-9;
};

using FieldScenario = std::variant<UniformE, UniformB, CrossedEB, RadialWell, MagneticBottle>;

struct FieldSample {
  Vec3 E;
  Vec3 B;
};

std::string_view scenario_name(const FieldScenario& s);

void validate(const FieldScenario& s);

FieldSample eval_fields(const FieldScenario& s, const Vec3& r, double t, const UnitsSystem& units);

// Electrostatic potential, for scenarios that define one.
std::optional<double> potential(const FieldScenario& s, const Vec3& r);

// Time after which the fields are smooth in t, when the scenario has a
// switch-off (the bottle kick). Multistep histories must not straddle it.
std::optional<double> smooth_after(const FieldScenario& s);

}  // namespace relpush
