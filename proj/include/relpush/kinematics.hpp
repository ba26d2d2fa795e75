#pragma once

#include <cmath>
#include <numbers>
#include <string>

namespace relpush {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s; y *= s; z *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

struct Species {
  double q = 1.0;
  double m = 1.0;
};

enum class UnitsLabel { Natural, Mks };

struct UnitsSystem {
  double c = 1.0;
  double mu0 = 4.0 * std::numbers::pi;
  UnitsLabel label = UnitsLabel::Natural;

  static UnitsSystem natural() { return {}; }
  static UnitsSystem mks() { return {299792458.0, 4.0e-7 * std::numbers::pi, UnitsLabel::Mks}; }
};

struct ParticleState {
  Vec3 r;
  Vec3 u;  // relativistic velocity gamma * v
  double t = 0.0;
};

void validate(const Species& sp);
void validate(const UnitsSystem& units);

double gamma_from_u(const Vec3& u, const UnitsSystem& units);
Vec3 velocity_from_u(const Vec3& u, const UnitsSystem& units);
Vec3 u_from_v(const Vec3& v, const UnitsSystem& units);

// du/dt = (q/m)(E + v x B)
Vec3 lorentz_acceleration(const ParticleState& state, const Vec3& E, const Vec3& B,
                          const Species& sp, const UnitsSystem& units);

// (gamma - 1) m c^2 written as m|u|^2 / (gamma + 1), which keeps its
// relative precision in the nonrelativistic limit.
double kinetic_energy(const Vec3& u, const Species& sp, const UnitsSystem& units);

}  // namespace relpush
