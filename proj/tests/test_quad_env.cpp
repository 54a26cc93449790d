#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tuner/quad_env.hpp"

#include <cmath>

using namespace tuner;
using namespace tuner::quad;

namespace {

double state_distance(const QuadState& a, const QuadState& b) {
  return std::sqrt(std::pow(a.x - b.x, 2) + std::pow(a.x_dot - b.x_dot, 2) +
                   std::pow(a.z - b.z, 2) + std::pow(a.z_dot - b.z_dot, 2) +
                   std::pow(a.theta - b.theta, 2) + std::pow(a.theta_dot - b.theta_dot, 2));
}

/// Many tiny RK4 substeps as an integration reference.
QuadState reference_integrate(QuadState s, double t1, double t2, QuadParams p, int substeps) {
  QuadParams fine = p;
  fine.dt = p.dt / substeps;
  for (int i = 0; i < substeps; ++i) s = dynamics_step(s, t1, t2, fine);
  return s;
}

PidGains stable_gains() {
  return {{0.6, 0.02, 0.45}, {4.0, 0.2, 2.5}, {4.0, 0.05, 0.06}};
}

}  // namespace

TEST_CASE("hover is a fixed point of the dynamics") {
  QuadParams p;
  const double hover = 0.5 * p.mass * p.gravity;
  QuadState s;
  s.z = 1.0;
  QuadState cur = s;
  for (int i = 0; i < 1000; ++i) {
    cur = dynamics_step(cur, hover, hover, p);
    CHECK(state_distance(cur, s) <= 1e-12);
  }
}

TEST_CASE("free fall matches the ballistic closed form") {
  QuadParams p;
  QuadState s;
  s.z = 2.0;
  const int steps = static_cast<int>(1.0 / p.dt);
  QuadState cur = s;
  for (int i = 0; i < steps; ++i) cur = dynamics_step(cur, 0.0, 0.0, p);
  const double t = steps * p.dt;
  CHECK(std::abs(cur.z - (2.0 - 0.5 * p.gravity * t * t)) <= 1e-8);
  CHECK(std::abs(cur.z_dot - (-p.gravity * t)) <= 1e-8);
  CHECK(cur.x == 0.0);
  CHECK(cur.theta == 0.0);
}

TEST_CASE("differential thrust produces the expected pitch rate") {
  QuadParams p;
  QuadState s;
  s.z = 1.0;
  const double base = 0.5 * p.mass * p.gravity;
  const double delta = 0.01;
  const QuadState next = dynamics_step(s, base - delta / 2, base + delta / 2, p);
  const double expected_rate = delta * p.moment_arm() / p.inertia_yy * p.dt;
  CHECK(next.theta_dot == doctest::Approx(expected_rate).epsilon(1e-6));
  const QuadState ref = reference_integrate(s, base - delta / 2, base + delta / 2, p, 100);
  CHECK(std::abs(next.theta_dot - ref.theta_dot) <= 1e-10);
}

TEST_CASE("rk4 step halving shrinks the error about sixteenfold") {
  QuadParams p;
  p.dt = 0.1;  // larger step keeps the truncation error well above round-off
  QuadState s;
  s.z = 1.0;
  s.x_dot = 0.5;
  s.z_dot = -0.3;
  s.theta = 0.3;
  s.theta_dot = 2.0;
  const double t1 = 0.10, t2 = 0.13;

  const QuadState ref = reference_integrate(s, t1, t2, p, 100);
  const QuadState full = dynamics_step(s, t1, t2, p);
  const QuadState half = reference_integrate(s, t1, t2, p, 2);
  const double ratio = state_distance(full, ref) / state_distance(half, ref);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("pid controller commands hover at zero error") {
  QuadParams p;
  EpisodeConfig cfg;
  QuadState s;
  s.z = 1.0;
  PidState ctl;
  const auto out = pid_controller(stable_gains(), s, 0.0, 1.0, ctl, p, cfg);
  CHECK(out.thrust_left == doctest::Approx(0.5 * p.mass * p.gravity));
  CHECK(out.thrust_right == doctest::Approx(0.5 * p.mass * p.gravity));
  CHECK(out.theta_ref == doctest::Approx(0.0));
}

TEST_CASE("positive x error pitches toward the target") {
  QuadParams p;
  EpisodeConfig cfg;
  QuadState s;
  s.z = 1.0;
  PidState ctl;
  PidGains g{};
  g.x.p = 1.0;  // only the x proportional term
  const auto out = pid_controller(g, s, 0.3, 1.0, ctl, p, cfg);
  CHECK(out.theta_ref > 0.0);
}

TEST_CASE("huge altitude error saturates total thrust") {
  QuadParams p;
  EpisodeConfig cfg;
  QuadState s;
  PidState ctl;
  PidGains g = stable_gains();
  const auto out = pid_controller(g, s, 0.0, 100.0, ctl, p, cfg);
  CHECK(out.thrust_left + out.thrust_right == doctest::Approx(2.0 * p.thrust_max));
}

TEST_CASE("commanded pitch saturates at the configured limit") {
  QuadParams p;
  EpisodeConfig cfg;
  QuadState s;
  s.z = 1.0;
  PidState ctl;
  PidGains g{};
  g.x.p = 20.0;
  const auto out = pid_controller(g, s, 1.0, 1.0, ctl, p, cfg);
  CHECK(out.theta_ref == doctest::Approx(cfg.theta_ref_max));
}

TEST_CASE("figure-8 reference") {
  EpisodeConfig cfg;
  SUBCASE("starts at the center") {
    const auto [x, z] = figure8_reference(0.0, cfg);
    CHECK(x == doctest::Approx(0.0));
    CHECK(z == doctest::Approx(cfg.z_center));
  }
  SUBCASE("quarter period reaches the x extreme") {
    const auto [x, z] = figure8_reference(cfg.period / 4.0, cfg);
    CHECK(x == doctest::Approx(cfg.amp_x));
    CHECK(z == doctest::Approx(cfg.z_center).epsilon(1e-12));
  }
  SUBCASE("closes after one period") {
    const auto [x0, z0] = figure8_reference(0.0, cfg);
    const auto [x1, z1] = figure8_reference(cfg.period, cfg);
    CHECK(std::abs(x1 - x0) <= 1e-12);
    CHECK(std::abs(z1 - z0) <= 1e-12);
  }
}

TEST_CASE("stable gains complete a frozen-reference episode cheaply") {
  QuadParams p;
  EpisodeConfig frozen;
  frozen.amp_x = 1e-12;  // reference pinned at the hover point
  frozen.amp_z = 1e-12;
  QuadState init;
  init.z = frozen.z_center;
  const EpisodeResult still = run_episode(stable_gains(), p, frozen, init);
  CHECK(still.steps_completed == frozen.steps);
  CHECK_FALSE(still.terminated_early);
  CHECK(still.quadratic_cost < 1.0);

  EpisodeConfig moving;
  PidGains zero{};
  const EpisodeResult drifting = run_episode(zero, p, moving, init);
  CHECK(still.quadratic_cost < drifting.quadratic_cost);
}

TEST_CASE("zero gains hover through the moving reference") {
  QuadParams p;
  EpisodeConfig cfg;
  QuadState init;
  init.z = cfg.z_center;
  PidGains zero{};
  const EpisodeResult r = run_episode(zero, p, cfg, init);
  // pure m*g feed-forward: large tracking cost but no boundary exit
  CHECK_FALSE(r.terminated_early);
  CHECK(r.quadratic_cost > 10.0);
}

TEST_CASE("destabilizing gains terminate on the boundary") {
  QuadParams p;
  EpisodeConfig cfg;
  QuadState init;
  init.z = cfg.z_center;
  init.x_dot = 0.01;
  PidGains bad{};
  bad.x = {8.0, 0.0, -3.0};  // positive velocity feedback
  bad.z = {4.0, 0.0, 2.0};
  bad.theta = {4.0, 0.0, 0.05};
  const EpisodeResult r = run_episode(bad, p, cfg, init);
  CHECK(r.terminated_early);
  CHECK(r.cause == Termination::boundary);
  CHECK(r.steps_completed < cfg.steps);
}

TEST_CASE("episode cost is nonnegative and trace covers completed steps") {
  QuadParams p;
  EpisodeConfig cfg;
  QuadState init;
  init.z = cfg.z_center;
  const EpisodeResult r = run_episode(stable_gains(), p, cfg, init);
  CHECK(r.quadratic_cost >= 0.0);
  CHECK(static_cast<int>(r.trace.size()) == r.steps_completed);
}

TEST_CASE("performance formula") {
  EpisodeConfig cfg;
  EpisodeResult r;
  r.quadratic_cost = 10.0;

  SUBCASE("completed episode pays no penalty") {
    r.steps_completed = cfg.steps;
    CHECK(performance(r, cfg) ==
          doctest::Approx(cfg.reward_scale * -10.0 + cfg.reward_offset));
  }
  SUBCASE("zero completed steps pay the full penalty") {
    r.steps_completed = 0;
    CHECK(performance(r, cfg) ==
          doctest::Approx(cfg.reward_scale * -10.0 + cfg.reward_offset - cfg.penalty_weight));
  }
  SUBCASE("penalty interpolates quadratically") {
    r.steps_completed = cfg.steps / 2;
    const double expected_penalty = cfg.penalty_weight * (1.0 - cfg.lambda * 0.25);
    CHECK(performance(r, cfg) ==
          doctest::Approx(cfg.reward_scale * -10.0 + cfg.reward_offset - expected_penalty));
  }
}

TEST_CASE("gain bounds round trip and rejection") {
  const GainBounds b = GainBounds::defaults();
  const PidGains g = stable_gains();
  const Vector unit = b.normalize(g);
  CHECK((unit.array() >= 0.0).all());
  CHECK((unit.array() <= 1.0).all());
  const PidGains back = b.denormalize(unit);
  const auto fa = g.flat();
  const auto fb = back.flat();
  for (int i = 0; i < 9; ++i) CHECK(fa[i] == doctest::Approx(fb[i]).epsilon(1e-12));

  PidGains out = g;
  out.theta.d = 11.0;  // above the D bound
  CHECK_THROWS_WITH_AS(b.check_physical(out), doctest::Contains("theta.d"), ArgumentError);
  CHECK_THROWS_AS(b.denormalize(Vector::Constant(9, 1.5)), ArgumentError);
}

TEST_CASE("objective setup") {
  Environment env;
  env.episode.seed = 99;

  SUBCASE("default controller is a safe seed") {
    const Vector unit = env.bounds.normalize(stable_gains());
    CHECK(env.objective(unit) > 0.0);
  }
  SUBCASE("deterministic across calls") {
    const Vector unit = Vector::Constant(9, 0.5);
    CHECK(env.objective(unit) == env.objective(unit));
  }
  SUBCASE("zero gains map deterministically") {
    const Vector zero = Vector::Zero(9);
    CHECK(env.objective(zero) == env.objective(zero));
  }
  SUBCASE("initial velocity respects the configured bound") {
    const QuadState s = initial_state(env.episode);
    CHECK(std::hypot(s.x_dot, s.z_dot) <= env.episode.init_vel_max);
    CHECK(s.z == env.episode.z_center);
  }
}

TEST_CASE("episodes are bit-deterministic") {
  Environment env;
  const Vector u = Vector::Constant(9, 0.3);
  const PidGains g = env.bounds.denormalize(u);
  const EpisodeResult a = env.run(g);
  const EpisodeResult b = env.run(g);
  REQUIRE(a.trace.size() == b.trace.size());
  CHECK(a.quadratic_cost == b.quadratic_cost);
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].state.x == b.trace[i].state.x);
    CHECK(a.trace[i].state.theta == b.trace[i].state.theta);
  }
}

TEST_CASE("config validation rejects bad episode settings") {
  EpisodeConfig cfg;
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg = EpisodeConfig{};
  cfg.warmup_steps = cfg.steps;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg = EpisodeConfig{};
  cfg.state_cost(0, 1) = 5.0;  // asymmetric indefinite Q
  cfg.state_cost(1, 0) = 5.0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}
