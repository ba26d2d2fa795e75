#include "relpush/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relpush/error.hpp"
#include "relpush/pushers.hpp"

namespace relpush {
namespace {

// 1 - cos(x) without cancellation.
double one_minus_cos(double x) {
  const double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}

}  // namespace

const char* to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::LinearAccel: return "LinearAccel";
    case OracleKind::Cyclotron: return "Cyclotron";
    case OracleKind::CrossedEB: return "CrossedEB";
    case OracleKind::FineStepReference: return "FineStepReference";
  }
  return "Unknown";
}

double linear_accel_position(double t, double Emag, const Species& sp, double gamma0,
                             const UnitsSystem& units) {
  const LinearAccelOracle o{{}, {1.0, 0.0, 0.0}, units.c * std::sqrt(gamma0 * gamma0 - 1.0), 0.0,
                            sp.q * Emag / sp.m, units.c};
  return o.at(t).r.x;
}

Vec3 cyclotron_position(double t, double Bmag, const Species& sp, double v0, double gamma0,
                        const UnitsSystem&) {
  const CyclotronOracle o{{}, {gamma0 * v0, 0.0, 0.0}, 0.0, sp.q * Bmag / (gamma0 * sp.m), gamma0};
  return o.at(t).r;
}

double crossed_field_u_param(double t) {
  // U solves U^3 + 6U = 6t and is odd in t; evaluate at |t| to avoid the
  // cancellation in sqrt(9t^2+8) + 3t for t < 0, then polish with Newton.
  const double a = std::fabs(t);
  const double s = std::sqrt(9.0 * a * a + 8.0) + 3.0 * a;
  const double c = std::cbrt(s);
  double U = c - 2.0 / c;
  for (int i = 0; i < 2; ++i) U -= (U * U * U + 6.0 * U - 6.0 * a) / (3.0 * U * U + 6.0);
  return std::copysign(U, t);
}

Vec3 crossed_field_position(double t) {
  const double U = crossed_field_u_param(t);
  return {U * U * U / 6.0, U * U / 2.0, 0.0};
}

ParticleState LinearAccelOracle::at(double t) const {
  const double tau = t - t0;
  const double us = s0 + rate * tau;
  const double g0 = std::sqrt(1.0 + s0 * s0 / (c * c));
  const double g = std::sqrt(1.0 + us * us / (c * c));
  // c^2 (g - g0) / rate, rewritten without the difference of square roots.
  const double x = tau * (us + s0) / (g + g0);
  return {r0 + x * dir, us * dir, t};
}

ParticleState CyclotronOracle::at(double t) const {
  const double th = omega * (t - t0);
  const double sn = std::sin(th), cs = std::cos(th), omc = one_minus_cos(th);
  const double rg = 1.0 / (gamma * omega);
  const Vec3 u{u0.x * cs + u0.y * sn, u0.y * cs - u0.x * sn, u0.z};
  const Vec3 r{r0.x + rg * (u0.x * sn + u0.y * omc), r0.y + rg * (u0.y * sn - u0.x * omc),
               r0.z + u0.z * (t - t0) / gamma};
  return {r, u, t};
}

ParticleState CrossedEBOracle::at(double t) const {
  const double U = crossed_field_u_param(t - t0);
  return {r0 + Vec3{U * U * U / 6.0, U * U / 2.0, 0.0}, {U * U / 2.0, U, 0.0}, t};
}

OracleKind oracle_kind(const AnalyticOracle& o) {
  if (std::holds_alternative<LinearAccelOracle>(o)) return OracleKind::LinearAccel;
  if (std::holds_alternative<CyclotronOracle>(o)) return OracleKind::Cyclotron;
  return OracleKind::CrossedEB;
}

ParticleState oracle_state(const AnalyticOracle& o, double t) {
  return std::visit([t](const auto& x) { return x.at(t); }, o);
}

std::optional<AnalyticOracle> analytic_oracle_for(const FieldScenario& s, const Species& sp,
                                                  const UnitsSystem& units,
                                                  const ParticleState& initial) {
  if (const auto* f = std::get_if<UniformE>(&s)) {
    const double Emag = norm(f->E0);
    if (Emag == 0.0) return std::nullopt;
    const Vec3 dir = f->E0 / Emag;
    const double s0 = dot(initial.u, dir);
    const Vec3 perp = initial.u - s0 * dir;
    if (norm(perp) > 1e-14 * std::max(1.0, norm(initial.u))) return std::nullopt;
    return LinearAccelOracle{initial.r, dir, s0, initial.t, sp.q * Emag / sp.m, units.c};
  }
  if (const auto* f = std::get_if<UniformB>(&s)) {
    if (f->B0.x != 0.0 || f->B0.y != 0.0 || f->B0.z == 0.0) return std::nullopt;
    const double g = gamma_from_u(initial.u, units);
    return CyclotronOracle{initial.r, initial.u, initial.t, sp.q * f->B0.z / (g * sp.m), g};
  }
  if (const auto* f = std::get_if<CrossedEB>(&s)) {
    const bool unit_config = f->E0 == Vec3{0.0, 1.0, 0.0} && f->B0 == Vec3{0.0, 0.0, 1.0} &&
                             sp.q == 1.0 && sp.m == 1.0 && units.c == 1.0 &&
                             initial.u == Vec3{};
    if (!unit_config) return std::nullopt;
    return CrossedEBOracle{initial.r, initial.t};
  }
  return std::nullopt;
}

namespace {

std::vector<ParticleState> rk4_samples(const FieldScenario& s, const Species& sp,
                                       const UnitsSystem& units, const ParticleState& initial,
                                       double spacing, int n_samples, int substeps) {
  std::vector<ParticleState> out;
  out.reserve(n_samples);
  ParticleState st = initial;
  out.push_back(st);
  const double h = spacing / substeps;
  for (int n = 1; n < n_samples; ++n) {
    const double t_from = initial.t + (n - 1) * spacing;
    for (int j = 0; j < substeps; ++j) {
      st.t = t_from + j * h;
      st = rk4_reference_step(st, s, sp, units, h);
    }
    st.t = initial.t + n * spacing;
    out.push_back(st);
  }
  return out;
}

}  // namespace

ReferenceTrajectory reference_trajectory(const FieldScenario& s, const Species& sp,
                                         const UnitsSystem& units, const ParticleState& initial,
                                         double t_end, int n_samples, bool check_halving,
                                         int substeps, double agreement_tol) {
  if (!(t_end > initial.t)) throw Error(ErrorCode::Validation, "reference needs t_end > t0");
  if (n_samples < 2) throw Error(ErrorCode::Validation, "reference needs >= 2 samples");
  if (substeps < 1) throw Error(ErrorCode::Validation, "reference needs >= 1 substep");
  const double spacing = (t_end - initial.t) / (n_samples - 1);
  ReferenceTrajectory ref;
  ref.dt_ref = spacing / substeps;
  ref.samples = rk4_samples(s, sp, units, initial, spacing, n_samples, substeps);
  if (!check_halving) return ref;

  const auto fine = rk4_samples(s, sp, units, initial, spacing, n_samples, 2 * substeps);
  double r_scale = 0.0, u_scale = 0.0, dr = 0.0, du = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    r_scale = std::max(r_scale, norm(fine[i].r));
    u_scale = std::max(u_scale, norm(fine[i].u));
    dr = std::max(dr, norm(fine[i].r - ref.samples[i].r));
    du = std::max(du, norm(fine[i].u - ref.samples[i].u));
  }
  const double rel_r = r_scale > 0.0 ? dr / r_scale : dr;
  const double rel_u = u_scale > 0.0 ? du / u_scale : du;
  ref.halving_agreement = std::max(rel_r, rel_u);
  ref.halving_checked = true;
  if (!(ref.halving_agreement <= agreement_tol)) {
    std::ostringstream msg;
    msg << "reference trajectory halving check failed: relative deviation "
        << ref.halving_agreement << " > " << agreement_tol;
    throw Error(ErrorCode::ReferenceNotConverged, msg.str());
  }
  return ref;
}

}  // namespace relpush
