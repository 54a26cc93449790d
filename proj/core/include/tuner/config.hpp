#pragma once

#include "tuner/kernel_selection.hpp"
#include "tuner/quad_env.hpp"
#include "tuner/safe_bo.hpp"

#include <json.hpp>

#include <string>

namespace tuner {

/// Kernel selection settings beyond the Nystrom parameters.
struct SelectionConfig {
  NystromConfig nystrom;
  int top_m = 3;
  int forest_trees = 100;
  int forest_min_leaf = 2;
  int dim_keep = 9;
};

struct CliConfig {
  int n_prior = 36;
  int threads = 1;
};

/// Resolved toolkit configuration: one JSON document with sections
/// quad, episode, gains_bounds, kernel, nystrom, bo, cli.
struct Config {
  quad::QuadParams quad;
  quad::EpisodeConfig episode;
  quad::GainBounds gains_bounds = quad::GainBounds::defaults();
  quad::PidGains default_gains;
  double kernel_lengthscale = 0.2;
  double kernel_signal_variance = 1.0;
  SelectionConfig selection;
  BoConfig bo;
  CliConfig cli;

  static Config defaults();
  /// Overlay a JSON document onto the defaults. Unknown keys are errors
  /// reported with their full path.
  static Config from_json(const nlohmann::json& doc);
  static Config load(const std::string& path);
  nlohmann::ordered_json to_json() const;

  BaseKernelParams base_params(int dims = 9) const {
    return BaseKernelParams::constant(dims, kernel_lengthscale, kernel_signal_variance);
  }
  quad::Environment environment() const { return {quad, episode, gains_bounds}; }
  void validate() const;
};

}  // namespace tuner
