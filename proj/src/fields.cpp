#include "relpush/fields.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "relpush/error.hpp"

namespace relpush {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kDipoleExclusion = 1e-9;

Vec3 dipole_field(const Vec3& moment, const Vec3& at, const Vec3& r, double mu0) {
  const Vec3 d = r - at;
  const double d2 = norm2(d);
  const double dn = std::sqrt(d2);
  if (dn < kDipoleExclusion) {
    std::ostringstream msg;
    msg << "bottle field evaluated within " << kDipoleExclusion << " m of a dipole at ("
        << at.x << ", " << at.y << ", " << at.z << ")";
    throw Error(ErrorCode::FieldSingularity, msg.str());
  }
  const double d3 = d2 * dn;
  const double d5 = d3 * d2;
  const double k = mu0 / (4.0 * std::numbers::pi);
  return k * (3.0 * dot(moment, d) / d5 * d - moment / d3);
}

}  // namespace

std::string_view scenario_name(const FieldScenario& s) {
  return std::visit(overloaded{
                        [](const UniformE&) { return std::string_view("UniformE"); },
                        [](const UniformB&) { return std::string_view("UniformB"); },
                        [](const CrossedEB&) { return std::string_view("CrossedEB"); },
                        [](const RadialWell&) { return std::string_view("RadialWell"); },
                        [](const MagneticBottle&) { return std::string_view("MagneticBottle"); },
                    },
                    s);
}

void validate(const FieldScenario& s) {
  std::visit(overloaded{
                 [](const UniformE& f) {
                   if (!is_finite(f.E0)) throw Error(ErrorCode::Validation, "UniformE field not finite");
                 },
                 [](const UniformB& f) {
                   if (!is_finite(f.B0)) throw Error(ErrorCode::Validation, "UniformB field not finite");
                 },
                 [](const CrossedEB& f) {
                   if (!is_finite(f.E0) || !is_finite(f.B0))
                     throw Error(ErrorCode::Validation, "CrossedEB fields not finite");
                 },
                 [](const RadialWell& f) {
                   if (!std::isfinite(f.phi_coeff) || !std::isfinite(f.b_coeff))
                     throw Error(ErrorCode::Validation, "RadialWell coefficients not finite");
                 },
                 [](const MagneticBottle& f) {
                   if (f.dipole_positions[0] == f.dipole_positions[1])
                     throw Error(ErrorCode::Validation, "bottle dipole positions must be distinct");
                   if (!(f.kick_duration >= 0.0))
                     throw Error(ErrorCode::Validation, "bottle kick_duration must be >= 0");
                   if (!is_finite(f.moment) || !is_finite(f.kick_E))
                     throw Error(ErrorCode::Validation, "bottle parameters not finite");
                 },
             },
             s);
}

FieldSample eval_fields(const FieldScenario& s, const Vec3& r, double t, const UnitsSystem& units) {
  return std::visit(
      overloaded{
          [](const UniformE& f) { return FieldSample{f.E0, {}}; },
          [](const UniformB& f) { return FieldSample{{}, f.B0}; },
          [](const CrossedEB& f) { return FieldSample{f.E0, f.B0}; },
          [&](const RadialWell& f) {
            const double rho = std::hypot(r.x, r.y);
            // On the axis B vanishes in the limit; E has no limit and is defined as 0.
            if (rho == 0.0) return FieldSample{};
            const Vec3 E{-f.phi_coeff * r.x / rho, -f.phi_coeff * r.y / rho, 0.0};
            return FieldSample{E, {0.0, 0.0, f.b_coeff * rho}};
          },
          [&](const MagneticBottle& f) {
            const Vec3 B = dipole_field(f.moment, f.dipole_positions[0], r, units.mu0) +
                           dipole_field(f.moment, f.dipole_positions[1], r, units.mu0);
            const Vec3 E = t < f.kick_duration ? f.kick_E : Vec3{};
            return FieldSample{E, B};
          },
      },
      s);
}

std::optional<double> potential(const FieldScenario& s, const Vec3& r) {
  if (const auto* w = std::get_if<RadialWell>(&s)) return w->phi_coeff * std::hypot(r.x, r.y);
  return std::nullopt;
}

std::optional<double> smooth_after(const FieldScenario& s) {
  if (const auto* b = std::get_if<MagneticBottle>(&s)) {
    if (b->kick_duration > 0.0 && !(b->kick_E == Vec3{})) return b->kick_duration;
  }
  return std::nullopt;
}

}  // namespace relpush
