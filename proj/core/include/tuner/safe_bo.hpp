#pragma once

#include "tuner/dataset.hpp"
#include "tuner/gp.hpp"
#include "tuner/rng.hpp"

#include <functional>
#include <string>
#include <vector>

namespace tuner {

enum class Acquisition { safe_ucb, safe_ei };

Acquisition acquisition_from_string(const std::string& name);
std::string to_string(Acquisition a);

enum class BetaSchedule { constant, logarithmic };

struct BoConfig {
  double beta = 2.0;
  BetaSchedule beta_schedule = BetaSchedule::constant;
  double beta_delta = 0.1;     // confidence level for the logarithmic schedule
  double p_min = 0.0;          // safety threshold
  int iterations = 150;        // post-prior evaluation budget
  int n_uniform = 5000;        // uniform candidates per iteration
  int n_local = 2000;          // Gaussian candidates around the incumbent
  double local_sigma = 0.05;
  double noise_variance = 1e-4;
  Acquisition acquisition = Acquisition::safe_ucb;
  bool standardize = true;     // z-score observations before fitting the surrogate
  // Floor deep crash values at p_min - winsor_sigmas*std(y) for the surrogate
  // only (0 = off): magnitudes far below the threshold carry no safety
  // gradient but wreck the interpolation amplitude.
  double winsor_sigmas = 0.0;
  int linebo_grid = 200;       // candidates per line
  int linebo_inner = 5;        // evaluations per line epoch
  int threads = 1;

  void validate() const;
  double beta_at(int iteration) const;  // 1-based
};

struct BoRecord {
  int iteration = 0;            // 1-based, post-prior
  Vector params;                // normalized coordinates
  double performance = 0.0;     // measured P
  bool safe = false;            // performance >= p_min
  double lower_bound = 0.0;     // GP lower bound at selection time (P units)
  double best_so_far = 0.0;
  bool stalled = false;         // empty safe set; incumbent re-evaluated
};

struct BoTrace {
  std::vector<BoRecord> records;
  Vector best_params;
  double best_performance = 0.0;
};

using Objective = std::function<double(const Eigen::Ref<const Vector>&)>;

/// Indices of candidates whose lower confidence bound clears p_min.
std::vector<Eigen::Index> safe_set(const GpModel& model, const Eigen::Ref<const Matrix>& candidates,
                                   double beta, double p_min, int n_threads = 1);

/// Argmax over rows of `safe_candidates` of the acquisition score; ties break
/// to the first index. best_y is the incumbent value used by safe-ei.
Eigen::Index acquire_next(const GpModel& model, const Eigen::Ref<const Matrix>& safe_candidates,
                          Acquisition acquisition, double beta, double best_y, int n_threads = 1);

/// The sequential safe loop: fit, propose inside the safe set, evaluate,
/// append. An empty safe set stalls on the incumbent instead of probing.
/// The prior must contain at least one observation with P >= p_min.
BoTrace run_safe_bo(const Objective& objective, const Dataset& prior, const KernelSpec& spec,
                    const BoConfig& cfg, const RngStream& rng);

/// Identical loop without the safe-set filter.
BoTrace run_unconstrained_bo(const Objective& objective, const Dataset& prior,
                             const KernelSpec& spec, const BoConfig& cfg, const RngStream& rng);

/// Safe line search: random directions through the incumbent, safe BO with a
/// one-dimensional kernel on a dense chord grid, re-centering each epoch.
BoTrace run_linebo(const Objective& objective, const Dataset& prior,
                   const BaseKernelParams& base_1d, const BoConfig& cfg, const RngStream& rng);

/// The conventional high-dimensional choice: orders {1, D} over all dims.
KernelSpec standard_kernel_baseline(int dims, const BaseKernelParams& base);

}  // namespace tuner
