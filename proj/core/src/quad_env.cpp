#include "tuner/quad_env.hpp"

#include <cmath>

namespace tuner::quad {

void QuadParams::validate() const {
  if (mass <= 0 || gravity <= 0 || arm_length <= 0 || inertia_yy <= 0 || thrust_max <= 0 || dt <= 0)
    throw ArgumentError("quad params: all physical constants must be > 0");
}

bool QuadState::finite() const {
  return std::isfinite(x) && std::isfinite(x_dot) && std::isfinite(z) && std::isfinite(z_dot) &&
         std::isfinite(theta) && std::isfinite(theta_dot);
}

GainBounds GainBounds::defaults() {
  GainBounds b;
  for (int loop = 0; loop < 3; ++loop) {
    b.lo[3 * loop + 0] = 0.0;
    b.hi[3 * loop + 0] = 20.0;  // P
    b.lo[3 * loop + 1] = 0.0;
    b.hi[3 * loop + 1] = 2.0;   // I
    b.lo[3 * loop + 2] = 0.0;
    b.hi[3 * loop + 2] = 10.0;  // D
  }
  return b;
}

void GainBounds::validate() const {
  for (int i = 0; i < 9; ++i)
    if (!(hi[i] > lo[i])) throw ArgumentError("gain bounds: hi must exceed lo");
}

namespace {
constexpr const char* kGainNames[9] = {"x.p", "x.i", "x.d", "z.p", "z.i",
                                       "z.d", "theta.p", "theta.i", "theta.d"};
}

Vector GainBounds::normalize(const PidGains& gains) const {
  const auto flat = gains.flat();
  Vector unit(9);
  for (int i = 0; i < 9; ++i) unit(i) = (flat[i] - lo[i]) / (hi[i] - lo[i]);
  return unit;
}

PidGains GainBounds::denormalize(const Eigen::Ref<const Vector>& unit) const {
  if (unit.size() != 9) throw ArgumentError("gains: normalized vector must have 9 entries");
  std::array<double, 9> flat{};
  for (int i = 0; i < 9; ++i) {
    if (unit(i) < 0.0 || unit(i) > 1.0)
      throw ArgumentError(std::string("gains: normalized ") + kGainNames[i] + " outside [0,1]");
    flat[i] = lo[i] + unit(i) * (hi[i] - lo[i]);
  }
  return PidGains::from_flat(flat);
}

void GainBounds::check_physical(const PidGains& gains) const {
  const auto flat = gains.flat();
  for (int i = 0; i < 9; ++i)
    if (flat[i] < lo[i] || flat[i] > hi[i])
      throw ArgumentError(std::string("gains: ") + kGainNames[i] + " outside configured bounds");
}

void EpisodeConfig::validate() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eq(state_cost);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> er(input_cost);
  if (eq.eigenvalues().minCoeff() < -1e-12 || er.eigenvalues().minCoeff() < -1e-12)
    throw ArgumentError("episode: Q and R must be positive semidefinite");
  if (steps < 1) throw ArgumentError("episode: steps must be >= 1");
  if (warmup_steps < 0 || warmup_steps >= steps)
    throw ArgumentError("episode: warmup_steps must be in [0, steps)");
  if (lambda <= 0.0 || lambda > 1.0) throw ArgumentError("episode: lambda must be in (0, 1]");
  if (penalty_weight < 0.0) throw ArgumentError("episode: penalty_weight must be >= 0");
  if (x_max <= 0 || z_max <= 0 || theta_max <= 0) throw ArgumentError("episode: safety box must be positive");
  if (period <= 0) throw ArgumentError("episode: period must be > 0");
  if (theta_ref_max <= 0 || delta_thrust_max <= 0 || integrator_limit <= 0)
    throw ArgumentError("episode: controller limits must be > 0");
  if (init_vel_max < 0) throw ArgumentError("episode: init_vel_max must be >= 0");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::boundary: return "boundary";
    case Termination::non_finite: return "non_finite";
  }
  return "unknown";
}

namespace {

struct Derivative {
  double dx, dx_dot, dz, dz_dot, dtheta, dtheta_dot;
};

Derivative eval(const QuadState& s, double total_thrust, double diff_thrust,
                const QuadParams& p) {
  return {
      s.x_dot,
      std::sin(s.theta) * total_thrust / p.mass,
      s.z_dot,
      std::cos(s.theta) * total_thrust / p.mass - p.gravity,
      s.theta_dot,
      diff_thrust * p.moment_arm() / p.inertia_yy,
  };
}

QuadState advance(const QuadState& s, const Derivative& d, double h) {
  return {s.x + h * d.dx,         s.x_dot + h * d.dx_dot,
          s.z + h * d.dz,         s.z_dot + h * d.dz_dot,
          s.theta + h * d.dtheta, s.theta_dot + h * d.dtheta_dot};
}

}  // namespace

QuadState dynamics_step(const QuadState& state, double thrust_left, double thrust_right,
                        const QuadParams& params) {
  const double total = thrust_left + thrust_right;
  const double diff = thrust_right - thrust_left;
  const double h = params.dt;
  const Derivative k1 = eval(state, total, diff, params);
  const Derivative k2 = eval(advance(state, k1, 0.5 * h), total, diff, params);
  const Derivative k3 = eval(advance(state, k2, 0.5 * h), total, diff, params);
  const Derivative k4 = eval(advance(state, k3, h), total, diff, params);
  QuadState next = state;
  next.x += h / 6.0 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
  next.x_dot += h / 6.0 * (k1.dx_dot + 2 * k2.dx_dot + 2 * k3.dx_dot + k4.dx_dot);
  next.z += h / 6.0 * (k1.dz + 2 * k2.dz + 2 * k3.dz + k4.dz);
  next.z_dot += h / 6.0 * (k1.dz_dot + 2 * k2.dz_dot + 2 * k3.dz_dot + k4.dz_dot);
  next.theta += h / 6.0 * (k1.dtheta + 2 * k2.dtheta + 2 * k3.dtheta + k4.dtheta);
  next.theta_dot += h / 6.0 * (k1.dtheta_dot + 2 * k2.dtheta_dot + 2 * k3.dtheta_dot + k4.dtheta_dot);
  return next;
}

ControlOutput pid_controller(const PidGains& gains, const QuadState& state, double x_ref,
                             double z_ref, PidState& ctl, const QuadParams& params,
                             const EpisodeConfig& config) {
  const double lim = config.integrator_limit;

  // z loop: total thrust
  const double e_z = z_ref - state.z;
  ctl.int_z = clip(ctl.int_z + e_z * params.dt, -lim, lim);
  const double total = clip(
      params.mass * (params.gravity + gains.z.p * e_z + gains.z.i * ctl.int_z - gains.z.d * state.z_dot),
      0.0, 2.0 * params.thrust_max);

  // x loop: pitch reference (positive pitch accelerates +x)
  const double e_x = x_ref - state.x;
  ctl.int_x = clip(ctl.int_x + e_x * params.dt, -lim, lim);
  const double theta_ref =
      clip(gains.x.p * e_x + gains.x.i * ctl.int_x - gains.x.d * state.x_dot,
           -config.theta_ref_max, config.theta_ref_max);

  // theta loop: differential thrust
  const double e_theta = theta_ref - state.theta;
  ctl.int_theta = clip(ctl.int_theta + e_theta * params.dt, -lim, lim);
  const double diff = clip(
      gains.theta.p * e_theta + gains.theta.i * ctl.int_theta - gains.theta.d * state.theta_dot,
      -config.delta_thrust_max, config.delta_thrust_max);

  ControlOutput out;
  out.theta_ref = theta_ref;
  out.thrust_left = clip(0.5 * (total - diff), 0.0, params.thrust_max);
  out.thrust_right = clip(0.5 * (total + diff), 0.0, params.thrust_max);
  return out;
}

std::pair<double, double> figure8_reference(double t, const EpisodeConfig& config) {
  const double omega = 2.0 * M_PI / config.period;
  return {config.amp_x * std::sin(omega * t),
          config.z_center + config.amp_z * std::sin(2.0 * omega * t)};
}

EpisodeResult run_episode(const PidGains& gains, const QuadParams& params,
                          const EpisodeConfig& config, const QuadState& initial) {
  params.validate();
  config.validate();

  EpisodeResult result;
  result.trace.reserve(config.steps);
  QuadState state = initial;
  PidState ctl;
  const double u_ref = 0.5 * params.mass * params.gravity;  // per-pair hover thrust

  for (int i = 0; i < config.steps; ++i) {
    if (!state.finite()) {
      result.terminated_early = true;
      result.cause = Termination::non_finite;
      result.steps_completed = i;
      return result;
    }
    if (std::abs(state.x) > config.x_max || state.z < 0.0 || state.z > config.z_max ||
        std::abs(state.theta) > config.theta_max) {
      result.terminated_early = true;
      result.cause = Termination::boundary;
      result.steps_completed = i;
      return result;
    }

    const double t = i * params.dt;
    const auto [x_ref, z_ref] = figure8_reference(t, config);
    const ControlOutput u = pid_controller(gains, state, x_ref, z_ref, ctl, params, config);

    if (i >= config.warmup_steps) {
      const Eigen::Vector3d e(state.x - x_ref, state.z - z_ref, state.theta - u.theta_ref);
      const Eigen::Vector2d du(u.thrust_left - u_ref, u.thrust_right - u_ref);
      result.quadratic_cost += 0.5 * e.dot(config.state_cost * e);
      result.quadratic_cost += 0.5 * du.dot(config.input_cost * du);
    }
    result.trace.push_back({t, state, x_ref, z_ref, u.theta_ref, u.thrust_left, u.thrust_right});
    state = dynamics_step(state, u.thrust_left, u.thrust_right, params);
  }
  result.steps_completed = config.steps;
  return result;
}

double performance(const EpisodeResult& result, const EpisodeConfig& config) {
  const double reward = -result.quadratic_cost;
  const double scaled = config.reward_scale * reward + config.reward_offset;
  const double completion = static_cast<double>(result.steps_completed) / config.steps;
  const double penalty = 1.0 - config.lambda * completion * completion;
  return scaled - config.penalty_weight * penalty;
}

QuadState initial_state(const EpisodeConfig& config) {
  RngEngine eng(RngStream{config.seed, 0});
  const double speed = config.init_vel_max * eng.uniform01();
  const double angle = 2.0 * M_PI * eng.uniform01();
  QuadState s;
  s.x = 0.0;
  s.z = config.z_center;
  s.x_dot = speed * std::cos(angle);
  s.z_dot = speed * std::sin(angle);
  return s;
}

double Environment::objective(const Eigen::Ref<const Vector>& gains_normalized) const {
  const PidGains gains = bounds.denormalize(gains_normalized);
  EpisodeResult result = run_episode(gains, quad, episode, initial_state(episode));
  return performance(result, episode);
}

EpisodeResult Environment::run(const PidGains& gains) const {
  bounds.check_physical(gains);
  return run_episode(gains, quad, episode, initial_state(episode));
}

}  // namespace tuner::quad
