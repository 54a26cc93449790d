#include "tuner/config.hpp"

#include <fstream>
#include <set>

namespace tuner {

namespace {

using nlohmann::json;

/// Reads known keys from one JSON object and rejects everything else,
/// reporting the offending key with its full path.
class StrictReader {
 public:
  StrictReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ArgumentError("config: " + path_ + " must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!node_.contains(key)) return;
    try {
      out = node_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ArgumentError("config: bad value at " + path_ + "." + key + ": " + e.what());
    }
  }

  bool has(const char* key) const { return node_.contains(key); }

  const json& child(const char* key) {
    seen_.insert(key);
    return node_.at(key);
  }

  std::string child_path(const char* key) const { return path_ + "." + key; }

  /// Rejects any key that was never read.
  void finish() const {
    for (const auto& item : node_.items())
      if (!seen_.count(item.key()))
        throw ArgumentError("config: unknown key " + path_ + "." + item.key());
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_pid(const json& node, const std::string& path, quad::Pid& out) {
  if (!node.is_array() || node.size() != 3)
    throw ArgumentError("config: " + path + " must be an array [P, I, D]");
  out.p = node[0].get<double>();
  out.i = node[1].get<double>();
  out.d = node[2].get<double>();
}

void read_bounds_triple(const json& node, const std::string& path, int gain_offset,
                        quad::GainBounds& bounds) {
  if (!node.is_array() || node.size() != 2)
    throw ArgumentError("config: " + path + " must be an array [lo, hi]");
  for (int loop = 0; loop < 3; ++loop) {
    bounds.lo[3 * loop + gain_offset] = node[0].get<double>();
    bounds.hi[3 * loop + gain_offset] = node[1].get<double>();
  }
}

}  // namespace

Config Config::defaults() {
  Config c;
  // Mediocre but reliably stable controller: the tuning baseline a_0.
  c.default_gains.x = {0.6, 0.02, 0.45};
  c.default_gains.z = {4.0, 0.2, 2.5};
  c.default_gains.theta = {4.0, 0.05, 0.06};
  return c;
}

Config Config::from_json(const nlohmann::json& doc) {
  Config c = defaults();
  StrictReader root(doc, "$");

  if (root.has("quad")) {
    StrictReader s(root.child("quad"), root.child_path("quad"));
    s.read("mass", c.quad.mass);
    s.read("gravity", c.quad.gravity);
    s.read("arm_length", c.quad.arm_length);
    s.read("inertia_yy", c.quad.inertia_yy);
    s.read("thrust_max", c.quad.thrust_max);
    s.read("dt", c.quad.dt);
    s.finish();
  }
  if (root.has("episode")) {
    StrictReader s(root.child("episode"), root.child_path("episode"));
    std::vector<double> q_diag, r_diag;
    s.read("q_diag", q_diag);
    s.read("r_diag", r_diag);
    if (!q_diag.empty()) {
      if (q_diag.size() != 3) throw ArgumentError("config: $.episode.q_diag needs 3 entries");
      c.episode.state_cost = Eigen::Vector3d(q_diag[0], q_diag[1], q_diag[2]).asDiagonal();
    }
    if (!r_diag.empty()) {
      if (r_diag.size() != 2) throw ArgumentError("config: $.episode.r_diag needs 2 entries");
      c.episode.input_cost = Eigen::Vector2d(r_diag[0], r_diag[1]).asDiagonal();
    }
    s.read("steps", c.episode.steps);
    s.read("warmup_steps", c.episode.warmup_steps);
    s.read("lambda", c.episode.lambda);
    s.read("penalty_weight", c.episode.penalty_weight);
    s.read("reward_scale", c.episode.reward_scale);
    s.read("reward_offset", c.episode.reward_offset);
    s.read("x_max", c.episode.x_max);
    s.read("z_max", c.episode.z_max);
    s.read("theta_max", c.episode.theta_max);
    s.read("amp_x", c.episode.amp_x);
    s.read("amp_z", c.episode.amp_z);
    s.read("z_center", c.episode.z_center);
    s.read("period", c.episode.period);
    s.read("theta_ref_max", c.episode.theta_ref_max);
    s.read("delta_thrust_max", c.episode.delta_thrust_max);
    s.read("integrator_limit", c.episode.integrator_limit);
    s.read("init_vel_max", c.episode.init_vel_max);
    s.read("seed", c.episode.seed);
    if (s.has("default_gains")) {
      StrictReader g(s.child("default_gains"), s.child_path("default_gains"));
      if (g.has("x")) read_pid(g.child("x"), g.child_path("x"), c.default_gains.x);
      if (g.has("z")) read_pid(g.child("z"), g.child_path("z"), c.default_gains.z);
      if (g.has("theta")) read_pid(g.child("theta"), g.child_path("theta"), c.default_gains.theta);
      g.finish();
    }
    s.finish();
  }
  if (root.has("gains_bounds")) {
    StrictReader s(root.child("gains_bounds"), root.child_path("gains_bounds"));
    if (s.has("p")) read_bounds_triple(s.child("p"), s.child_path("p"), 0, c.gains_bounds);
    if (s.has("i")) read_bounds_triple(s.child("i"), s.child_path("i"), 1, c.gains_bounds);
    if (s.has("d")) read_bounds_triple(s.child("d"), s.child_path("d"), 2, c.gains_bounds);
    s.finish();
  }
  if (root.has("kernel")) {
    StrictReader s(root.child("kernel"), root.child_path("kernel"));
    s.read("lengthscale", c.kernel_lengthscale);
    s.read("signal_variance", c.kernel_signal_variance);
    s.finish();
  }
  if (root.has("nystrom")) {
    StrictReader s(root.child("nystrom"), root.child_path("nystrom"));
    s.read("c", c.selection.nystrom.c);
    s.read("k", c.selection.nystrom.k);
    s.read("mu", c.selection.nystrom.mu);
    s.read("trials", c.selection.nystrom.trials);
    s.read("top_m", c.selection.top_m);
    s.read("forest_trees", c.selection.forest_trees);
    s.read("forest_min_leaf", c.selection.forest_min_leaf);
    s.read("dim_keep", c.selection.dim_keep);
    s.finish();
  }
  if (root.has("bo")) {
    StrictReader s(root.child("bo"), root.child_path("bo"));
    s.read("beta", c.bo.beta);
    std::string schedule = c.bo.beta_schedule == BetaSchedule::constant ? "constant" : "log";
    s.read("beta_schedule", schedule);
    if (schedule == "constant")
      c.bo.beta_schedule = BetaSchedule::constant;
    else if (schedule == "log")
      c.bo.beta_schedule = BetaSchedule::logarithmic;
    else
      throw ArgumentError("config: $.bo.beta_schedule must be 'constant' or 'log'");
    s.read("beta_delta", c.bo.beta_delta);
    s.read("p_min", c.bo.p_min);
    s.read("iterations", c.bo.iterations);
    s.read("n_uniform", c.bo.n_uniform);
    s.read("n_local", c.bo.n_local);
    s.read("local_sigma", c.bo.local_sigma);
    s.read("noise_variance", c.bo.noise_variance);
    std::string acq = to_string(c.bo.acquisition);
    s.read("acquisition", acq);
    c.bo.acquisition = acquisition_from_string(acq);
    s.read("standardize", c.bo.standardize);
    s.read("linebo_grid", c.bo.linebo_grid);
    s.read("linebo_inner", c.bo.linebo_inner);
    s.finish();
  }
  if (root.has("cli")) {
    StrictReader s(root.child("cli"), root.child_path("cli"));
    s.read("n_prior", c.cli.n_prior);
    s.read("threads", c.cli.threads);
    s.finish();
  }
  root.finish();
  c.validate();
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ArgumentError("config: invalid JSON in " + path + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::ordered_json Config::to_json() const {
  nlohmann::ordered_json j;
  j["quad"] = {{"mass", quad.mass},
               {"gravity", quad.gravity},
               {"arm_length", quad.arm_length},
               {"inertia_yy", quad.inertia_yy},
               {"thrust_max", quad.thrust_max},
               {"dt", quad.dt}};
  j["episode"] = {
      {"q_diag", {episode.state_cost(0, 0), episode.state_cost(1, 1), episode.state_cost(2, 2)}},
      {"r_diag", {episode.input_cost(0, 0), episode.input_cost(1, 1)}},
      {"steps", episode.steps},
      {"warmup_steps", episode.warmup_steps},
      {"lambda", episode.lambda},
      {"penalty_weight", episode.penalty_weight},
      {"reward_scale", episode.reward_scale},
      {"reward_offset", episode.reward_offset},
      {"x_max", episode.x_max},
      {"z_max", episode.z_max},
      {"theta_max", episode.theta_max},
      {"amp_x", episode.amp_x},
      {"amp_z", episode.amp_z},
      {"z_center", episode.z_center},
      {"period", episode.period},
      {"theta_ref_max", episode.theta_ref_max},
      {"delta_thrust_max", episode.delta_thrust_max},
      {"integrator_limit", episode.integrator_limit},
      {"init_vel_max", episode.init_vel_max},
      {"seed", episode.seed},
      {"default_gains",
       {{"x", {default_gains.x.p, default_gains.x.i, default_gains.x.d}},
        {"z", {default_gains.z.p, default_gains.z.i, default_gains.z.d}},
        {"theta", {default_gains.theta.p, default_gains.theta.i, default_gains.theta.d}}}}};
  j["gains_bounds"] = {{"p", {gains_bounds.lo[0], gains_bounds.hi[0]}},
                       {"i", {gains_bounds.lo[1], gains_bounds.hi[1]}},
                       {"d", {gains_bounds.lo[2], gains_bounds.hi[2]}}};
  j["kernel"] = {{"lengthscale", kernel_lengthscale}, {"signal_variance", kernel_signal_variance}};
  j["nystrom"] = {{"c", selection.nystrom.c},
                  {"k", selection.nystrom.k},
                  {"mu", selection.nystrom.mu},
                  {"trials", selection.nystrom.trials},
                  {"top_m", selection.top_m},
                  {"forest_trees", selection.forest_trees},
                  {"forest_min_leaf", selection.forest_min_leaf},
                  {"dim_keep", selection.dim_keep}};
  j["bo"] = {{"beta", bo.beta},
             {"beta_schedule", bo.beta_schedule == BetaSchedule::constant ? "constant" : "log"},
             {"beta_delta", bo.beta_delta},
             {"p_min", bo.p_min},
             {"iterations", bo.iterations},
             {"n_uniform", bo.n_uniform},
             {"n_local", bo.n_local},
             {"local_sigma", bo.local_sigma},
             {"noise_variance", bo.noise_variance},
             {"acquisition", to_string(bo.acquisition)},
             {"standardize", bo.standardize},
             {"linebo_grid", bo.linebo_grid},
             {"linebo_inner", bo.linebo_inner}};
  j["cli"] = {{"n_prior", cli.n_prior}, {"threads", cli.threads}};
  return j;
}

void Config::validate() const {
  quad.validate();
  episode.validate();
  gains_bounds.validate();
  gains_bounds.check_physical(default_gains);
  if (kernel_lengthscale <= 0.0 || kernel_signal_variance <= 0.0)
    throw ArgumentError("config: kernel hyperparameters must be > 0");
  if (selection.top_m < 1 || selection.top_m > 9)
    throw ArgumentError("config: nystrom.top_m must be in 1..9");
  if (selection.dim_keep < 1 || selection.dim_keep > 9)
    throw ArgumentError("config: nystrom.dim_keep must be in 1..9");
  if (selection.forest_trees < 1) throw ArgumentError("config: nystrom.forest_trees must be >= 1");
  if (selection.forest_min_leaf < 1)
    throw ArgumentError("config: nystrom.forest_min_leaf must be >= 1");
  if (selection.nystrom.mu <= 0.0) throw ArgumentError("config: nystrom.mu must be > 0");
  if (selection.nystrom.trials < 1) throw ArgumentError("config: nystrom.trials must be >= 1");
  bo.validate();
  if (cli.n_prior < 1) throw ArgumentError("config: cli.n_prior must be >= 1");
  if (cli.threads < 1) throw ArgumentError("config: cli.threads must be >= 1");
}

}  // namespace tuner
