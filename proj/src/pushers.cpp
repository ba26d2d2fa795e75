#include "relpush/pushers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "relpush/error.hpp"
#include "relpush/oracles.hpp"
#include "relpush/simd/stencil.hpp"

namespace relpush {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Boris: return "Boris";
    case Method::AdamsPC3: return "AdamsPC3";
    case Method::AdamsPC4: return "AdamsPC4";
    case Method::ExponentialPC: return "ExponentialPC";
    case Method::RK4Reference: return "RK4Reference";
  }
  return "Unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::Boris, Method::AdamsPC3, Method::AdamsPC4, Method::ExponentialPC,
                   Method::RK4Reference})
    if (method_name(m) == name) return m;
  return std::nullopt;
}

void validate(const PusherConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw Error(ErrorCode::Validation, "pusher dt must be > 0");
  if (!(cfg.corrector_tol > 0.0)) throw Error(ErrorCode::Validation, "corrector_tol must be > 0");
  if (cfg.max_correctors < 1) throw Error(ErrorCode::Validation, "max_correctors must be >= 1");
  if (cfg.method == Method::ExponentialPC && !cfg.exp_coeffs)
    throw Error(ErrorCode::MissingCoefficients, "ExponentialPC requires exp coefficients");
}

int history_length(const PusherConfig& cfg) {
  switch (cfg.method) {
    case Method::AdamsPC3: return 3;
    case Method::AdamsPC4: return 4;
    case Method::ExponentialPC:
      if (!cfg.exp_coeffs) throw Error(ErrorCode::MissingCoefficients, "ExponentialPC requires exp coefficients");
      return cfg.exp_coeffs->k;
    default: return 1;
  }
}

MultistepStencil MultistepStencil::adams(int order) {
  MultistepStencil st;
  if (order == 4) {
    st.k = 4;
    st.pred_value = {0.0, 0.0, 0.0, 1.0};
    st.pred_deriv = {-9.0 / 24.0, 37.0 / 24.0, -59.0 / 24.0, 55.0 / 24.0};
    st.corr_value = {0.0, 0.0, 0.0, 1.0};
    st.corr_deriv = {0.0, 1.0 / 24.0, -5.0 / 24.0, 19.0 / 24.0};
    st.corr_deriv_new = 9.0 / 24.0;
  } else if (order == 3) {
    st.k = 3;
    st.pred_value = {0.0, 0.0, 1.0};
    st.pred_deriv = {5.0 / 12.0, -16.0 / 12.0, 23.0 / 12.0};
    st.corr_value = {0.0, 0.0, 1.0};
    st.corr_deriv = {0.0, -1.0 / 12.0, 8.0 / 12.0};
    st.corr_deriv_new = 5.0 / 12.0;
  } else {
    throw Error(ErrorCode::Validation, "Adams stencils exist for order 3 and 4");
  }
  return st;
}

MultistepStencil MultistepStencil::exponential(const ExpPcCoefficients& c) {
  MultistepStencil st;
  st.k = c.k;
  st.pred_value.assign(c.predictor_value_w.rbegin(), c.predictor_value_w.rend());
  st.pred_deriv.assign(c.predictor_deriv_w.rbegin(), c.predictor_deriv_w.rend());
  st.corr_value.assign(c.corrector_value_w.rbegin(), c.corrector_value_w.rend());
  st.corr_deriv.assign(c.corrector_deriv_w.rbegin(), c.corrector_deriv_w.rend() - 1);
  st.corr_deriv_new = c.corrector_deriv_w.front();
  return st;
}

HistoryEntry evaluate(const ParticleState& st, const FieldScenario& s, const Species& sp,
                      const UnitsSystem& units) {
  const FieldSample f = eval_fields(s, st.r, st.t, units);
  return {st, lorentz_acceleration(st, f.E, f.B, sp, units), velocity_from_u(st.u, units)};
}

ParticleState boris_step(const ParticleState& state, const FieldScenario& s, const Species& sp,
                         const UnitsSystem& units, double dt) {
  const Vec3 v0 = velocity_from_u(state.u, units);
  const double h = 0.5 * dt;
  const FieldSample f = eval_fields(s, state.r + h * v0, state.t + h, units);
  const double qmh = sp.q / sp.m * h;

  const Vec3 eps = qmh * f.E;
  const Vec3 um = state.u + eps;
  const Vec3 tv = (qmh / gamma_from_u(um, units)) * f.B;
  const Vec3 sv = (2.0 / (1.0 + norm2(tv))) * tv;
  const Vec3 up = um + cross(um + cross(um, tv), sv);
  const Vec3 u1 = up + eps;

  // Trapezoidal position update keeps the scheme second order with r and u
  // on the same integer time levels.
  const Vec3 v1 = velocity_from_u(u1, units);
  return {state.r + h * (v0 + v1), u1, state.t + dt};
}

ParticleState rk4_reference_step(const ParticleState& state, const FieldScenario& s,
                                 const Species& sp, const UnitsSystem& units, double dt) {
  struct D {
    Vec3 dr, du;
  };
  auto f = [&](const Vec3& r, const Vec3& u, double t) {
    const ParticleState p{r, u, t};
    const FieldSample fs = eval_fields(s, r, t, units);
    return D{velocity_from_u(u, units), lorentz_acceleration(p, fs.E, fs.B, sp, units)};
  };
  const double h = 0.5 * dt;
  const D k1 = f(state.r, state.u, state.t);
  const D k2 = f(state.r + h * k1.dr, state.u + h * k1.du, state.t + h);
  const D k3 = f(state.r + h * k2.dr, state.u + h * k2.du, state.t + h);
  const D k4 = f(state.r + dt * k3.dr, state.u + dt * k3.du, state.t + dt);
  const double w = dt / 6.0;
  return {state.r + w * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr),
          state.u + w * (k1.du + 2.0 * k2.du + 2.0 * k3.du + k4.du), state.t + dt};
}

ParticleState multistep_step(StateHistory& hist, const MultistepStencil& st, const FieldScenario& s,
                             const Species& sp, const UnitsSystem& units, const PusherConfig& cfg,
                             StepStats* stats) {
  if (static_cast<int>(hist.capacity()) != st.k || !hist.full())
    throw Error(ErrorCode::HistoryNotReady, "multistep step needs a full history of length " +
                                                std::to_string(st.k));
  const double dt = hist.dt();
  const auto U = hist.u_window();
  const auto R = hist.r_window();
  const auto A = hist.a_window();
  const auto V = hist.v_window();

  ParticleState next{from_lane(simd::combine(st.pred_value, R, st.pred_deriv, V, dt)),
                     from_lane(simd::combine(st.pred_value, U, st.pred_deriv, A, dt)),
                     hist.next_time()};
  const Vec3 base_r = from_lane(simd::combine(st.corr_value, R, st.corr_deriv, V, dt));
  const Vec3 base_u = from_lane(simd::combine(st.corr_value, U, st.corr_deriv, A, dt));
  const double h0 = dt * st.corr_deriv_new;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  int iters = 0;
  HistoryEntry e = evaluate(next, s, sp, units);
  while (iters < cfg.max_correctors) {
    ++iters;
    const Vec3 u_c = base_u + h0 * e.a;
    const Vec3 r_c = base_r + h0 * e.v;
    const double du = norm(u_c - next.u) / (norm(u_c) + eps);
    const double dr = norm(r_c - next.r) / (norm(r_c) + eps);
    next.u = u_c;
    next.r = r_c;
    e = evaluate(next, s, sp, units);
    if (std::max(du, dr) < cfg.corrector_tol) break;
  }
  hist.push(e);
  if (stats) stats->corrector_iterations = iters;
  return next;
}

ParticleState adams_pc_step(StateHistory& hist, const FieldScenario& s, const Species& sp,
                            const UnitsSystem& units, const PusherConfig& cfg, StepStats* stats) {
  if (cfg.method != Method::AdamsPC3 && cfg.method != Method::AdamsPC4)
    throw Error(ErrorCode::Validation, "adams_pc_step needs an Adams method");
  const int order = cfg.method == Method::AdamsPC4 ? 4 : 3;
  if (static_cast<int>(hist.size()) < order)
    throw Error(ErrorCode::HistoryNotReady, "Adams step needs " + std::to_string(order) + " samples");
  return multistep_step(hist, MultistepStencil::adams(order), s, sp, units, cfg, stats);
}

ParticleState exp_pc_step(StateHistory& hist, const FieldScenario& s, const Species& sp,
                          const UnitsSystem& units, const PusherConfig& cfg, StepStats* stats) {
  if (!cfg.exp_coeffs)
    throw Error(ErrorCode::MissingCoefficients, "ExponentialPC requires exp coefficients");
  if (static_cast<int>(hist.size()) < cfg.exp_coeffs->k)
    throw Error(ErrorCode::HistoryNotReady,
                "exponential step needs " + std::to_string(cfg.exp_coeffs->k) + " samples");
  return multistep_step(hist, MultistepStencil::exponential(*cfg.exp_coeffs), s, sp, units, cfg,
                        stats);
}

Bootstrap bootstrap_history(const FieldScenario& s, const Species& sp, const UnitsSystem& units,
                            const PusherConfig& cfg, const ParticleState& initial, int k) {
  if (k < 1) throw Error(ErrorCode::Validation, "bootstrap needs k >= 1");
  const double dt = cfg.dt;
  Bootstrap out{StateHistory(static_cast<std::size_t>(k), dt), {}, false};
  if (k == 1) {
    out.history.push(evaluate(initial, s, sp, units));
    return out;
  }

  if (const auto oracle = analytic_oracle_for(s, sp, units, initial)) {
    for (int i = k - 1; i >= 1; --i) {
      const double t = initial.t - i * dt;
      out.history.push(evaluate(oracle_state(*oracle, t), s, sp, units));
    }
    out.history.push(evaluate(initial, s, sp, units));
    out.from_oracle = true;
    return out;
  }

  int skip = 0;
  if (const auto ts = smooth_after(s); ts && *ts > initial.t)
    skip = static_cast<int>(std::ceil((*ts - initial.t) / dt * (1.0 - 1e-12)));

  const double h = dt / kBootstrapSubsteps;
  ParticleState st = initial;
  out.warmup.push_back(st);
  for (int n = 1; n <= skip + k - 1; ++n) {
    const double t_from = initial.t + (n - 1) * dt;
    for (int j = 0; j < kBootstrapSubsteps; ++j) {
      st.t = t_from + j * h;
      st = rk4_reference_step(st, s, sp, units, h);
    }
    st.t = initial.t + n * dt;
    out.warmup.push_back(st);
  }
  for (int n = skip; n <= skip + k - 1; ++n) out.history.push(evaluate(out.warmup[n], s, sp, units));
  return out;
}

}  // namespace relpush
