#include "relpush/kinematics.hpp"

#include "relpush/error.hpp"

namespace relpush {

void validate(const Species& sp) {
  if (!(sp.m > 0.0) || !std::isfinite(sp.m) || !std::isfinite(sp.q))
    throw Error(ErrorCode::Validation, "species mass must be positive and finite");
}

void validate(const UnitsSystem& units) {
  if (!(units.c > 0.0) || !(units.mu0 > 0.0) || !std::isfinite(units.c) || !std::isfinite(units.mu0))
    throw Error(ErrorCode::Validation, "units require c > 0 and mu0 > 0");
}

double gamma_from_u(const Vec3& u, const UnitsSystem& units) {
  const double c2 = units.c * units.c;
  return std::sqrt(1.0 + norm2(u) / c2);
}

Vec3 velocity_from_u(const Vec3& u, const UnitsSystem& units) {
  return u / gamma_from_u(u, units);
}

Vec3 u_from_v(const Vec3& v, const UnitsSystem& units) {
  const double beta2 = norm2(v) / (units.c * units.c);
  if (!(beta2 < 1.0)) throw Error(ErrorCode::Validation, "velocity must be below c");
  return v / std::sqrt(1.0 - beta2);
}

Vec3 lorentz_acceleration(const ParticleState& state, const Vec3& E, const Vec3& B,
                          const Species& sp, const UnitsSystem& units) {
  const Vec3 v = velocity_from_u(state.u, units);
  return (sp.q / sp.m) * (E + cross(v, B));
}

double kinetic_energy(const Vec3& u, const Species& sp, const UnitsSystem& units) {
  const double g = gamma_from_u(u, units);
  return sp.m * norm2(u) / (g + 1.0);
}

}  // namespace relpush
