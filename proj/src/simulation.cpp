#include "relpush/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "relpush/error.hpp"

namespace relpush {
namespace {

constexpr int kReferenceSubstepsPerStep = 100;

Sample make_sample(const ExperimentConfig& cfg, const std::optional<AnalyticOracle>& oracle,
                   const ParticleState& st, double t, bool warmup, int iters) {
  Sample s;
  s.t = t;
  s.r = st.r;
  s.u = st.u;
  s.gamma = gamma_from_u(st.u, cfg.units);
  s.kinetic_energy = kinetic_energy(st.u, cfg.species, cfg.units);
  if (const auto phi = potential(cfg.scenario, st.r)) s.potential_energy = cfg.species.q * *phi;
  s.total_energy = s.kinetic_energy + s.potential_energy.value_or(0.0);
  if (oracle) s.error = norm(st.r - oracle_state(*oracle, t).r);
  s.warmup = warmup;
  s.corrector_iterations = iters;
  return s;
}

[[noreturn]] void rethrow_at_step(const Error& e, int step) {
  throw Error(e.code(), "step " + std::to_string(step) + ": " + e.what());
}

}  // namespace

TimeSeries run_simulation(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  validate(cfg);
  ensure_coefficients(cfg);
  validate(cfg.pusher);

  const double t0 = cfg.initial.t;
  const double dt = cfg.pusher.dt;
  const int n_steps = steps_for(cfg.t_end - t0, dt);
  const auto oracle = analytic_oracle_for(cfg.scenario, cfg.species, cfg.units, cfg.initial);
  auto grid = [&](int n) { return t0 + n * dt; };

  TimeSeries ts;
  ts.method = std::string(method_name(cfg.pusher.method));
  ts.scenario = std::string(scenario_name(cfg.scenario));
  ts.samples.reserve(static_cast<std::size_t>(n_steps) + 1);
  auto record = [&](const ParticleState& st, int n, bool warm, int iters) {
    ts.samples.push_back(make_sample(cfg, oracle, st, grid(n), warm, iters));
  };

  int n = 0;
  try {
    switch (cfg.pusher.method) {
      case Method::Boris: {
        ParticleState st = cfg.initial;
        record(st, 0, false, 0);
        for (n = 1; n <= n_steps; ++n) {
          st = boris_step(st, cfg.scenario, cfg.species, cfg.units, dt);
          st.t = grid(n);
          record(st, n, false, 0);
        }
        break;
      }
      case Method::RK4Reference: {
        ParticleState st = cfg.initial;
        record(st, 0, false, 0);
        const double h = dt / kReferenceSubstepsPerStep;
        for (n = 1; n <= n_steps; ++n) {
          for (int j = 0; j < kReferenceSubstepsPerStep; ++j) {
            st.t = grid(n - 1) + j * h;
            st = rk4_reference_step(st, cfg.scenario, cfg.species, cfg.units, h);
          }
          st.t = grid(n);
          record(st, n, false, 0);
        }
        break;
      }
      default: {
        const MultistepStencil stencil =
            cfg.pusher.method == Method::ExponentialPC
                ? MultistepStencil::exponential(*cfg.pusher.exp_coeffs)
                : MultistepStencil::adams(cfg.pusher.method == Method::AdamsPC4 ? 4 : 3);
        Bootstrap boot = bootstrap_history(cfg.scenario, cfg.species, cfg.units, cfg.pusher,
                                           cfg.initial, stencil.k);
        int first = 0;
        if (boot.from_oracle) {
          record(cfg.initial, 0, false, 0);
        } else {
          first = static_cast<int>(boot.warmup.size()) - 1;
          // The newest seed sample is the first one that counts.
          for (int i = 0; i <= std::min(first, n_steps); ++i) record(boot.warmup[i], i, i < first, 0);
        }
        StepStats stats;
        for (n = first + 1; n <= n_steps; ++n) {
          const ParticleState st =
              multistep_step(boot.history, stencil, cfg.scenario, cfg.species, cfg.units, cfg.pusher, &stats);
          record(st, n, false, stats.corrector_iterations);
        }
        break;
      }
    }
  } catch (const Error& e) {
    rethrow_at_step(e, n);
  }
  for (const Sample& s : ts.samples) {
    if (!is_finite(s.r) || !is_finite(s.u) || !std::isfinite(s.total_energy))
      throw Error(ErrorCode::IllConditioned, "non-finite state at t=" + std::to_string(s.t));
  }
  return ts;
}

std::vector<Vec3> oracle_positions(const ExperimentConfig& cfg, const TimeSeries& traj) {
  std::vector<Vec3> out;
  out.reserve(traj.samples.size());
  if (const auto o = analytic_oracle_for(cfg.scenario, cfg.species, cfg.units, cfg.initial)) {
    for (const Sample& s : traj.samples) out.push_back(oracle_state(*o, s.t).r);
    return out;
  }
  if (traj.samples.size() < 2) {
    for (const Sample& s : traj.samples) out.push_back(s.r);
    return out;
  }
  const auto ref = reference_trajectory(cfg.scenario, cfg.species, cfg.units, cfg.initial,
                                        traj.samples.back().t, static_cast<int>(traj.samples.size()));
  for (const ParticleState& p : ref.samples) out.push_back(p.r);
  return out;
}

ErrorNorm error_norm_detail(const TimeSeries& traj, const std::vector<Vec3>& oracle) {
  if (traj.samples.size() != oracle.size())
    throw Error(ErrorCode::LengthMismatch, "error_norm: " + std::to_string(traj.samples.size()) +
                                               " samples vs " + std::to_string(oracle.size()) + " oracle points");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    if (traj.samples[i].warmup) continue;
    num += norm2(traj.samples[i].r - oracle[i]);
    den += norm2(oracle[i]);
  }
  if (den == 0.0) return {std::sqrt(num), true};
  return {std::sqrt(num) / std::sqrt(den), false};
}

double error_norm(const TimeSeries& traj, const std::vector<Vec3>& oracle) {
  return error_norm_detail(traj, oracle).value;
}

EnergyDrift energy_drift_detail(const TimeSeries& traj, EnergyWindow w) {
  EnergyDrift d;
  d.uses_total = !traj.samples.empty() && traj.samples.front().potential_energy.has_value();
  double first = 0.0, last = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const Sample& s : traj.samples) {
    if (s.t < w.start_t || s.t > w.end_t) continue;
    const double e = d.uses_total ? s.total_energy : s.kinetic_energy;
    if (d.samples == 0) first = e;
    last = e;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
    ++d.samples;
  }
  if (d.samples == 0) throw Error(ErrorCode::Validation, "energy window holds no samples");
  const double scale = first != 0.0 ? std::fabs(first) : 1.0;
  d.relative_range = (hi - lo) / scale;
  d.net = (last - first) / scale;
  return d;
}

double energy_drift(const TimeSeries& traj, EnergyWindow w) { return energy_drift_detail(traj, w).relative_range; }

double gamma_drift(const TimeSeries& traj, EnergyWindow w) {
  double g0 = 0.0, worst = 0.0;
  bool have = false;
  for (const Sample& s : traj.samples) {
    if (s.t < w.start_t || s.t > w.end_t) continue;
    if (!have) {
      g0 = s.gamma;
      have = true;
    }
    worst = std::max(worst, std::fabs(s.gamma - g0) / g0);
  }
  if (!have) throw Error(ErrorCode::Validation, "gamma window holds no samples");
  return worst;
}

double first_post_warmup_time(const TimeSeries& traj) {
  for (const Sample& s : traj.samples)
    if (!s.warmup) return s.t;
  throw Error(ErrorCode::Validation, "trajectory has no post-warm-up samples");
}

const char* to_string(FitStatus s) {
  switch (s) {
    case FitStatus::Ok: return "ok";
    case FitStatus::TooFewPoints: return "too_few_points";
    case FitStatus::AllPointsAtFloor: return "all_points_at_floor";
  }
  return "unknown";
}

void fit_convergence(ConvergenceTable& t) {
  t.fit_window.clear();
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    t.rows[i].in_fit = t.rows[i].error > 10.0 * t.floor;
    if (t.rows[i].in_fit) t.fit_window.push_back(static_cast<int>(i));
  }
  const std::size_t n = t.fit_window.size();
  if (n == 0) {
    t.status = FitStatus::AllPointsAtFloor;
    t.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  if (n < 3) {
    t.status = FitStatus::TooFewPoints;
    t.fitted_slope = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i : t.fit_window) {
    const double x = std::log(t.rows[i].dt), y = std::log(t.rows[i].error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  t.fitted_slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  t.status = FitStatus::Ok;
}

ConvergenceTable convergence_study(const ExperimentConfig& cfg_in, int jobs) {
  if (cfg_in.dt_sweep.size() < 4)
    throw Error(ErrorCode::Validation, "convergence study needs at least 4 dt_sweep entries");
  ExperimentConfig cfg = cfg_in;
  ensure_coefficients(cfg);
  if (cfg.sweep_t_end) cfg.t_end = *cfg.sweep_t_end;

  ConvergenceTable table;
  table.method = std::string(method_name(cfg.pusher.method));
  table.scenario = std::string(scenario_name(cfg.scenario));
  const auto oracle = analytic_oracle_for(cfg.scenario, cfg.species, cfg.units, cfg.initial);
  table.oracle = oracle ? oracle_kind(*oracle) : OracleKind::FineStepReference;

  std::vector<double> dts = cfg.dt_sweep;
  std::sort(dts.begin(), dts.end(), std::greater<>());
  table.rows.resize(dts.size());
  std::vector<std::exception_ptr> failures(dts.size());

  auto run_one = [&](std::size_t i) {
    try {
      ExperimentConfig c = cfg;
      c.pusher.dt = dts[i];
      const TimeSeries ts = run_simulation(c);
      table.rows[i] = {dts[i], static_cast<int>(ts.samples.size()) - 1,
                       error_norm(ts, oracle_positions(c, ts)), false};
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  const std::size_t workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1) {
    for (std::size_t i = 0; i < dts.size(); ++i) run_one(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < dts.size(); i += workers) run_one(i);
      });
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  fit_convergence(table);
  return table;
}

}  // namespace relpush
