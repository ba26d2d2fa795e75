#include <doctest.h>

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>

#include "gen.hpp"
#include "relpush/error.hpp"
#include "relpush/oracles.hpp"
#include "relpush/pushers.hpp"

using namespace relpush;

namespace {

const UnitsSystem nat = UnitsSystem::natural();
const Species unit_sp{1.0, 1.0};

std::shared_ptr<const ExpPcCoefficients> default_coeffs() {
  static const auto c = std::make_shared<const ExpPcCoefficients>(build_exp_pc_coefficients());
  return c;
}

PusherConfig config(Method m, double dt) {
  PusherConfig cfg;
  cfg.method = m;
  cfg.dt = dt;
  if (m == Method::ExponentialPC) cfg.exp_coeffs = default_coeffs();
  return cfg;
}

ParticleState step_multi(StateHistory& h, const FieldScenario& s, const PusherConfig& cfg,
                         StepStats* stats = nullptr) {
  if (cfg.method == Method::ExponentialPC) return exp_pc_step(h, s, unit_sp, nat, cfg, stats);
  return adams_pc_step(h, s, unit_sp, nat, cfg, stats);
}

// Fills a k-history with a uniform-velocity particle and constant acceleration samples.
StateHistory constant_history(int k, double dt, Vec3 u, Vec3 a) {
  StateHistory h(static_cast<std::size_t>(k), dt);
  const Vec3 v = velocity_from_u(u, nat);
  for (int i = 0; i < k; ++i) {
    HistoryEntry e;
    e.state = {i * dt * v, u, i * dt};
    e.a = a;
    e.v = v;
    h.push(e);
  }
  return h;
}

}  // namespace

TEST_CASE("method names round trip") {
  for (Method m : {Method::Boris, Method::AdamsPC3, Method::AdamsPC4, Method::ExponentialPC,
                   Method::RK4Reference})
    CHECK(parse_method(method_name(m)) == m);
  CHECK_FALSE(parse_method("Leapfrog").has_value());
}

TEST_CASE("pusher config validation") {
  PusherConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.dt = 0.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = PusherConfig{};
  cfg.corrector_tol = 0.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = PusherConfig{};
  cfg.max_correctors = 0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = PusherConfig{};
  cfg.method = Method::ExponentialPC;
  try {
    validate(cfg);
    FAIL("expected missing coefficients");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingCoefficients);
  }
  CHECK(history_length(config(Method::Boris, 0.1)) == 1);
  CHECK(history_length(config(Method::AdamsPC3, 0.1)) == 3);
  CHECK(history_length(config(Method::AdamsPC4, 0.1)) == 4);
  CHECK(history_length(config(Method::ExponentialPC, 0.1)) == 22);
}

TEST_CASE("boris preserves |u| in a magnetic field") {
  test::Gen g(41);
  for (int i = 0; i < 200; ++i) {
    const FieldScenario s = UniformB{g.vec(-5, 5)};
    ParticleState st{g.vec(-1, 1), g.vec(-3, 3), 0.0};
    const double dt = g.uniform(1e-3, 3.0);
    const ParticleState n = boris_step(st, s, unit_sp, nat, dt);
    CHECK(std::fabs(norm(n.u) - norm(st.u)) <= 1e-14 * norm(st.u));
    CHECK(n.t == st.t + dt);
  }
}

TEST_CASE("boris in a pure electric field is an exact kick") {
  test::Gen g(42);
  for (int i = 0; i < 100; ++i) {
    const Vec3 E = g.vec(-2, 2);
    const ParticleState st{g.vec(-1, 1), g.vec(-3, 3), 0.0};
    const double dt = g.uniform(1e-3, 1.0);
    const ParticleState n = boris_step(st, UniformE{E}, unit_sp, nat, dt);
    const Vec3 want = st.u + dt * E;
    CHECK(test::rel_diff(n.u, want) <= 1e-15);
  }
}

TEST_CASE("boris is second order on the cyclotron orbit") {
  const FieldScenario s = UniformB{{0, 0, 1}};
  const double gamma0 = std::sqrt(2.0);
  const double v0 = 1.0 / gamma0;
  auto error_after_period = [&](double dt) {
    const int n = static_cast<int>(std::ceil(2 * std::numbers::pi * gamma0 / dt));
    ParticleState st{{}, {1, 0, 0}, 0.0};
    for (int i = 0; i < n; ++i) st = boris_step(st, s, unit_sp, nat, dt);
    return norm(st.r - cyclotron_position(st.t, 1.0, unit_sp, v0, gamma0, nat));
  };
  const double e1 = error_after_period(0.1);
  const double e2 = error_after_period(0.05);
  CHECK(e1 < 1e-2);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("rk4 reference step examples") {
  const ParticleState st{{1, 2, 3}, {0.5, 0, 0}, 0.0};
  const ParticleState free = rk4_reference_step(st, UniformE{{0, 0, 0}}, unit_sp, nat, 0.3);
  CHECK(free.u == st.u);
  CHECK(test::rel_diff(free.r, st.r + 0.3 * velocity_from_u(st.u, nat)) <= 1e-15);

  const ParticleState kicked = rk4_reference_step(st, UniformE{{1, 0, 0}}, unit_sp, nat, 0.01);
  CHECK(std::fabs(kicked.u.x - 0.51) <= 1e-14);

  const Vec3 u0{1, 0, 0};
  const double gamma0 = std::sqrt(2.0);
  const double T = 2 * std::numbers::pi * gamma0;
  const int n = 10000;
  ParticleState c{{}, u0, 0.0};
  for (int i = 0; i < n; ++i) {
    c = rk4_reference_step(c, UniformB{{0, 0, 1}}, unit_sp, nat, T / n);
    c.t = (i + 1) * (T / n);
  }
  CHECK(norm(c.r - cyclotron_position(T, 1.0, unit_sp, 1.0 / gamma0, gamma0, nat)) <= 1e-10);
}

TEST_CASE("adams predictor is exact for constant acceleration") {
  for (Method m : {Method::AdamsPC3, Method::AdamsPC4}) {
    const int k = m == Method::AdamsPC4 ? 4 : 3;
    const MultistepStencil st = MultistepStencil::adams(k);
    double ws = 0.0;
    for (double w : st.pred_deriv) ws += w;
    CHECK(ws == doctest::Approx(1.0).epsilon(1e-15));
    double cs = st.corr_deriv_new;
    for (double w : st.corr_deriv) cs += w;
    CHECK(cs == doctest::Approx(1.0).epsilon(1e-15));

    // The constant-acceleration history is not a solution of a field, so
    // check the predictor alone through the kernel.
    const double dt = 0.1;
    const Vec3 u{0.2, 0.1, 0.0}, a{0.5, -0.25, 1.0};
    StateHistory h = constant_history(k, dt, u, a);
    const Vec3 pred = from_lane(simd::combine(st.pred_value, h.u_window(), st.pred_deriv,
                                              h.a_window(), dt));
    CHECK(test::rel_diff(pred, u + dt * a) <= 1e-15);
  }
}

TEST_CASE("zero field multistep steps keep u fixed and converge in one corrector pass") {
  const FieldScenario zero = UniformE{{0, 0, 0}};
  for (Method m : {Method::AdamsPC3, Method::AdamsPC4, Method::ExponentialPC}) {
    const PusherConfig cfg = config(m, 0.1);
    const int k = history_length(cfg);
    const Vec3 u{0.3, -0.4, 0.2};
    StateHistory h = constant_history(k, cfg.dt, u, {});
    const Vec3 v = velocity_from_u(u, nat);
    for (int n = 0; n < 50; ++n) {
      StepStats stats;
      const Vec3 before = h.newest().state.u;
      const ParticleState st = step_multi(h, zero, cfg, &stats);
      CHECK(stats.corrector_iterations == 1);
      if (m == Method::ExponentialPC) {
        CHECK(test::rel_diff(st.u, before) <= 1e-12);
      } else {
        CHECK(st.u == u);
      }
      CHECK(test::rel_diff(st.r, st.t * v) <= 1e-11);
    }
  }
}

TEST_CASE("multistep steps refuse a short history") {
  const FieldScenario zero = UniformE{{0, 0, 0}};
  for (Method m : {Method::AdamsPC3, Method::AdamsPC4, Method::ExponentialPC}) {
    const PusherConfig cfg = config(m, 0.1);
    const int k = history_length(cfg);
    StateHistory h(static_cast<std::size_t>(k), 0.1);
    h.push(evaluate({}, zero, unit_sp, nat));
    try {
      step_multi(h, zero, cfg);
      FAIL("expected HistoryNotReady");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::HistoryNotReady);
    }
  }
  PusherConfig bare = config(Method::ExponentialPC, 0.1);
  bare.exp_coeffs.reset();
  StateHistory h(22, 0.1);
  try {
    exp_pc_step(h, zero, unit_sp, nat, bare);
    FAIL("expected MissingCoefficients");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingCoefficients);
  }
}

TEST_CASE("exponential stencil integrates y' = lambda y on exact samples") {
  const ExpPcCoefficients& c = *default_coeffs();
  const int k = c.k;
  // lambda * k * dt = -1, the window-normalized form of a unit decay.
  const double dt = 0.01;
  const double lambda = -1.0 / (k * dt);
  auto y = [&](int j) { return std::exp(lambda * dt * j); };  // sample times j*dt; newest is k-1
  double pred = 0.0, corr = 0.0;
  for (int i = 1; i <= k; ++i) {
    const double yi = y(k - i);
    pred += c.predictor_value_w[i - 1] * yi + dt * c.predictor_deriv_w[i - 1] * lambda * yi;
    corr += c.corrector_value_w[i - 1] * yi + dt * c.corrector_deriv_w[i] * lambda * yi;
  }
  const double exact = y(k);
  corr += dt * c.corrector_deriv_w[0] * lambda * exact;
  const double yn = y(k - 1);
  CHECK(std::fabs(pred - exact) <= 1e-10 * yn);
  CHECK(std::fabs(corr - exact) <= 1e-10 * yn);

  // Oscillatory case on the imaginary axis at the window edge.
  const std::complex<double> li{0.0, 3.0 / (k * dt)};
  std::complex<double> p = 0.0;
  for (int i = 1; i <= k; ++i) {
    const auto yi = std::exp(li * (dt * (k - i)));
    p += c.predictor_value_w[i - 1] * yi + dt * c.predictor_deriv_w[i - 1] * li * yi;
  }
  CHECK(std::abs(p - std::exp(li * (dt * k))) <= 1e-10);
}

TEST_CASE("corrector needs a single pass once the predictor is accurate") {
  const FieldScenario s = UniformB{{0, 0, 1}};
  const ParticleState init{{}, {1, 0, 0}, 0.0};
  PusherConfig cfg = config(Method::ExponentialPC, 0.01);
  Bootstrap b = bootstrap_history(s, unit_sp, nat, cfg, init, 22);
  for (int n = 0; n < 20; ++n) {
    StepStats stats;
    exp_pc_step(b.history, s, unit_sp, nat, cfg, &stats);
    CHECK(stats.corrector_iterations == 1);
  }
}

TEST_CASE("bootstrap seeds from closed forms when available") {
  const FieldScenario s = UniformE{{1, 0, 0}};
  const ParticleState init{{}, {1, 0, 0}, 0.0};
  PusherConfig cfg = config(Method::AdamsPC4, 0.1);
  const Bootstrap b = bootstrap_history(s, unit_sp, nat, cfg, init, 4);
  CHECK(b.from_oracle);
  CHECK(b.warmup.empty());
  REQUIRE(b.history.full());
  for (int i = 0; i < 4; ++i) {
    const ParticleState st = b.history.at(static_cast<std::size_t>(i)).state;
    CHECK(st.t == doctest::Approx(-0.1 * i).epsilon(1e-15));
    const double x = linear_accel_position(st.t, 1.0, unit_sp, std::sqrt(2.0), nat);
    CHECK(std::fabs(st.r.x - x) <= 1e-14);
  }
  CHECK(b.history.newest().state.u == init.u);

  const Bootstrap one = bootstrap_history(s, unit_sp, nat, config(Method::Boris, 0.1), init, 1);
  CHECK(one.history.size() == 1);
  CHECK(one.history.newest().state.r == init.r);
}

TEST_CASE("bootstrap without a closed form warms up with the reference integrator") {
  MagneticBottle bottle;
  bottle.kick_duration = 0.0;
  const UnitsSystem mks = UnitsSystem::mks();
  const Species e{-1.6e-19, 9.1e-31};
  const ParticleState init{{0, 5, 0}, {0, 1e5, 2e5}, 0.0};
  PusherConfig cfg;
  cfg.method = Method::ExponentialPC;
  cfg.dt = 1e-8;
  cfg.exp_coeffs = default_coeffs();
  const Bootstrap b = bootstrap_history(bottle, e, mks, cfg, init, 22);
  CHECK_FALSE(b.from_oracle);
  REQUIRE(b.warmup.size() == 22);
  CHECK(b.warmup.back().t == doctest::Approx(21e-8).epsilon(1e-14));
  CHECK(b.history.at(21).state.t == 0.0);
  CHECK(b.history.newest().state.t == b.warmup.back().t);

  // With the kick switched on the window starts after it ends.
  const MagneticBottle kicked;
  const Bootstrap k = bootstrap_history(kicked, e, mks, cfg, init, 22);
  CHECK(k.history.at(21).state.t >= kicked.kick_duration * (1 - 1e-12));
  CHECK(k.warmup.size() == 23);
  CHECK(k.warmup.front().t == 0.0);
}

TEST_CASE("magnetic energy conservation over long runs") {
  const FieldScenario s = UniformB{{0, 0, 1}};
  const ParticleState init{{}, {1, 0, 0}, 0.0};
  const double gamma0 = gamma_from_u(init.u, nat);
  const double T = 2 * std::numbers::pi * gamma0;

  SUBCASE("boris over 1e5 steps") {
    ParticleState st = init;
    double worst = 0.0;
    for (int n = 0; n < 100000; ++n) {
      st = boris_step(st, s, unit_sp, nat, 0.1);
      worst = std::max(worst, std::fabs(gamma_from_u(st.u, nat) - gamma0) / gamma0);
    }
    CHECK(worst <= 1e-12);
  }

  SUBCASE("exponential over 100 periods") {
    PusherConfig cfg = config(Method::ExponentialPC, T / 60);
    cfg.corrector_tol = 1e-14;
    Bootstrap b = bootstrap_history(s, unit_sp, nat, cfg, init, 22);
    double worst = 0.0;
    for (int n = 0; n < 6000; ++n) {
      const ParticleState st = exp_pc_step(b.history, s, unit_sp, nat, cfg);
      worst = std::max(worst, std::fabs(gamma_from_u(st.u, nat) - gamma0) / gamma0);
    }
    CHECK(worst <= 1e-12);
  }

  SUBCASE("adams4 gains energy") {
    const PusherConfig cfg = config(Method::AdamsPC4, T / 60);
    Bootstrap b = bootstrap_history(s, unit_sp, nat, cfg, init, 4);
    ParticleState st = init;
    double prev = gamma0;
    int decreases = 0;
    for (int n = 0; n < 6000; ++n) {
      st = adams_pc_step(b.history, s, unit_sp, nat, cfg);
      const double g = gamma_from_u(st.u, nat);
      if (n % 60 == 59) {
        if (g < prev) ++decreases;
        prev = g;
      }
    }
    CHECK(decreases == 0);
    CHECK((gamma_from_u(st.u, nat) - gamma0) / gamma0 >= 1e-6);
  }
}

TEST_CASE("pushers are deterministic") {
  const FieldScenario s = CrossedEB{};
  const ParticleState init{};
  for (Method m : {Method::Boris, Method::AdamsPC4, Method::ExponentialPC}) {
    auto run = [&] {
      const PusherConfig cfg = config(m, 0.1);
      Bootstrap b = bootstrap_history(s, unit_sp, nat, cfg, init, history_length(cfg));
      ParticleState st = init;
      for (int n = 0; n < 200; ++n)
        st = m == Method::Boris ? boris_step(st, s, unit_sp, nat, cfg.dt) : step_multi(b.history, s, cfg);
      return st;
    };
    const ParticleState a = run(), b = run();
    CHECK(a.r == b.r);
    CHECK(a.u == b.u);
    CHECK(a.t == b.t);
  }
}
