#include "tuner/safe_bo.hpp"

#include "tuner/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tuner {

Acquisition acquisition_from_string(const std::string& name) {
  if (name == "safe-ucb") return Acquisition::safe_ucb;
  if (name == "safe-ei") return Acquisition::safe_ei;
  throw ArgumentError("unknown acquisition '" + name + "' (expected safe-ucb or safe-ei)");
}

std::string to_string(Acquisition a) {
  return a == Acquisition::safe_ucb ? "safe-ucb" : "safe-ei";
}

void BoConfig::validate() const {
  if (beta < 0.0) throw ArgumentError("bo: beta must be >= 0");
  if (iterations < 1) throw ArgumentError("bo: iterations must be >= 1");
  if (n_uniform < 0 || n_local < 0 || n_uniform + n_local < 1)
    throw ArgumentError("bo: need at least one candidate per iteration");
  if (n_local > 0 && local_sigma <= 0.0) throw ArgumentError("bo: local_sigma must be > 0");
  if (noise_variance < 0.0) throw ArgumentError("bo: noise_variance must be >= 0");
  if (beta_delta <= 0.0 || beta_delta >= 1.0) throw ArgumentError("bo: beta_delta must be in (0,1)");
  if (linebo_grid < 2) throw ArgumentError("bo: linebo_grid must be >= 2");
  if (linebo_inner < 1) throw ArgumentError("bo: linebo_inner must be >= 1");
}

double BoConfig::beta_at(int iteration) const {
  if (beta_schedule == BetaSchedule::constant) return beta;
  const double m = static_cast<double>(n_uniform + n_local);
  const double n = static_cast<double>(iteration);
  return std::sqrt(2.0 * std::log(m * n * n * M_PI * M_PI / (6.0 * beta_delta)));
}

namespace {

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::numbers::sqrt2); }
double normal_pdf(double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI); }

double expected_improvement(double mean, double sd, double best) {
  if (sd <= 0.0) return std::max(0.0, mean - best);
  const double t = (mean - best) / sd;
  return (mean - best) * normal_cdf(t) + sd * normal_pdf(t);
}

/// Floors values far below the safety threshold before the surrogate fit.
/// The safe-set logic is unchanged; this only tames the interpolation
/// amplitude that deep crash magnitudes would force on the posterior mean.
void winsorize(Vector& y, const BoConfig& cfg) {
  if (cfg.winsor_sigmas <= 0.0 || y.size() < 2) return;
  const double mean = y.mean();
  const double sd = std::sqrt((y.array() - mean).square().sum() / static_cast<double>(y.size()));
  if (sd <= 0.0) return;
  const double floor = cfg.p_min - cfg.winsor_sigmas * sd;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = std::max(y(i), floor);
}

/// Linear map between measured performance and the scale the surrogate is
/// fitted on: centered on the safety threshold and scaled by the observation
/// spread. With the zero-mean GP prior this makes unexplored regions revert
/// to the threshold, so the far field can never look safe by default.
struct YScaler {
  double center = 0.0;
  double scale = 1.0;

  static YScaler fit(const Vector& y, double p_min, bool enabled) {
    YScaler s;
    if (!enabled) return s;
    s.center = p_min;
    if (y.size() >= 2) {
      const double mean = y.mean();
      const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size());
      if (var > 0.0) s.scale = std::sqrt(var);
    }
    return s;
  }
  double to_model(double v) const { return (v - center) / scale; }
  double to_raw(double v) const { return v * scale + center; }
};

struct Incumbent {
  Eigen::Index index = -1;
  double value = -std::numeric_limits<double>::infinity();
};

/// Best observation; restricted to P >= p_min when require_safe.
Incumbent find_incumbent(const Dataset& data, double p_min, bool require_safe) {
  Incumbent inc;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (require_safe && data.y(i) < p_min) continue;
    if (data.y(i) > inc.value) {
      inc.value = data.y(i);
      inc.index = i;
    }
  }
  return inc;
}

double evaluate_guarded(const Objective& objective, const Eigen::Ref<const Vector>& x,
                        double p_min) {
  try {
    return objective(x);
  } catch (const std::exception&) {
    return p_min - 1.0;  // failed evaluation observed as unsafe data
  }
}

BoTrace run_bo_loop(const Objective& objective, const Dataset& prior, const KernelSpec& spec,
                    const BoConfig& cfg, const RngStream& rng, bool filter_safe) {
  cfg.validate();
  spec.validate();
  if (prior.empty()) throw ArgumentError("bo: prior is empty");
  if (find_incumbent(prior, cfg.p_min, true).index < 0)
    throw ArgumentError("bo: prior contains no observation with performance >= p_min");

  Dataset data = prior;
  BoTrace trace;
  trace.records.reserve(cfg.iterations);
  double best = data.y.maxCoeff();

  for (int it = 1; it <= cfg.iterations; ++it) {
    Dataset fit_data = data;
    winsorize(fit_data.y, cfg);
    const YScaler scaler = YScaler::fit(fit_data.y, cfg.p_min, cfg.standardize);
    for (Eigen::Index i = 0; i < fit_data.size(); ++i) fit_data.y(i) = scaler.to_model(fit_data.y(i));
    const GpModel model = GpModel::fit(fit_data, spec, cfg.noise_variance);

    const Incumbent inc = find_incumbent(data, cfg.p_min, /*require_safe=*/true);
    const Vector center = data.x.row(inc.index).transpose();
    const Matrix candidates =
        candidate_batch(center, cfg.n_uniform, cfg.n_local, cfg.local_sigma, rng.child(it));

    const double beta = cfg.beta_at(it);
    const double threshold = scaler.to_model(cfg.p_min);

    BoRecord rec;
    rec.iteration = it;
    if (filter_safe) {
      const auto safe = safe_set(model, candidates, beta, threshold, cfg.threads);
      if (safe.empty()) {
        rec.stalled = true;
        rec.params = center;
        const auto [lb, ub] = model.confidence_bounds(center, beta);
        (void)ub;
        rec.lower_bound = scaler.to_raw(lb);
      } else {
        Matrix safe_rows(static_cast<Eigen::Index>(safe.size()), candidates.cols());
        for (std::size_t i = 0; i < safe.size(); ++i) safe_rows.row(i) = candidates.row(safe[i]);
        const Eigen::Index pick = acquire_next(model, safe_rows, cfg.acquisition, beta,
                                               scaler.to_model(best), cfg.threads);
        rec.params = safe_rows.row(pick).transpose();
        const auto [lb, ub] = model.confidence_bounds(rec.params, beta);
        (void)ub;
        rec.lower_bound = scaler.to_raw(lb);
      }
    } else {
      const Eigen::Index pick =
          acquire_next(model, candidates, cfg.acquisition, beta, scaler.to_model(best), cfg.threads);
      rec.params = candidates.row(pick).transpose();
      const auto [lb, ub] = model.confidence_bounds(rec.params, beta);
      (void)ub;
      rec.lower_bound = scaler.to_raw(lb);
    }

    rec.performance = evaluate_guarded(objective, rec.params, cfg.p_min);
    rec.safe = rec.performance >= cfg.p_min;
    best = std::max(best, rec.performance);
    rec.best_so_far = best;
    data.append(rec.params, rec.performance);
    trace.records.push_back(std::move(rec));
  }

  const Incumbent final_inc = find_incumbent(data, cfg.p_min, /*require_safe=*/false);
  trace.best_params = data.x.row(final_inc.index).transpose();
  trace.best_performance = final_inc.value;
  return trace;
}

}  // namespace

std::vector<Eigen::Index> safe_set(const GpModel& model, const Eigen::Ref<const Matrix>& candidates,
                                   double beta, double p_min, int n_threads) {
  const auto [means, vars] = model.predict_batch(candidates, n_threads);
  std::vector<Eigen::Index> safe;
  for (Eigen::Index i = 0; i < candidates.rows(); ++i)
    if (means(i) - beta * std::sqrt(vars(i)) >= p_min) safe.push_back(i);
  return safe;
}

Eigen::Index acquire_next(const GpModel& model, const Eigen::Ref<const Matrix>& safe_candidates,
                          Acquisition acquisition, double beta, double best_y, int n_threads) {
  if (safe_candidates.rows() == 0) throw ArgumentError("acquire_next: empty candidate set");
  const auto [means, vars] = model.predict_batch(safe_candidates, n_threads);
  Eigen::Index arg = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < safe_candidates.rows(); ++i) {
    const double sd = std::sqrt(vars(i));
    const double score = acquisition == Acquisition::safe_ucb
                             ? means(i) + beta * sd
                             : expected_improvement(means(i), sd, best_y);
    if (score > best_score) {
      best_score = score;
      arg = i;
    }
  }
  return arg;
}

BoTrace run_safe_bo(const Objective& objective, const Dataset& prior, const KernelSpec& spec,
                    const BoConfig& cfg, const RngStream& rng) {
  return run_bo_loop(objective, prior, spec, cfg, rng, /*filter_safe=*/true);
}

BoTrace run_unconstrained_bo(const Objective& objective, const Dataset& prior,
                             const KernelSpec& spec, const BoConfig& cfg, const RngStream& rng) {
  return run_bo_loop(objective, prior, spec, cfg, rng, /*filter_safe=*/false);
}

BoTrace run_linebo(const Objective& objective, const Dataset& prior,
                   const BaseKernelParams& base_1d, const BoConfig& cfg, const RngStream& rng) {
  cfg.validate();
  if (base_1d.dims() != 1) throw ArgumentError("linebo: base kernel must be one-dimensional");
  if (prior.empty()) throw ArgumentError("bo: prior is empty");
  if (find_incumbent(prior, cfg.p_min, true).index < 0)
    throw ArgumentError("bo: prior contains no observation with performance >= p_min");

  const Eigen::Index dims = prior.dims();
  const KernelSpec line_spec = KernelSpec::make(1, {1}, base_1d);
  Dataset data = prior;
  BoTrace trace;
  trace.records.reserve(cfg.iterations);
  double best = data.y.maxCoeff();
  int evaluations = 0;

  for (int epoch = 1; evaluations < cfg.iterations; ++epoch) {
    const Incumbent inc = find_incumbent(data, cfg.p_min, /*require_safe=*/true);
    const Vector center = data.x.row(inc.index).transpose();

    // direction uniform on the sphere
    RngEngine eng(rng.child(epoch));
    Vector direction(dims);
    double norm = 0.0;
    do {
      for (Eigen::Index d = 0; d < dims; ++d) direction(d) = eng.normal();
      norm = direction.norm();
    } while (norm == 0.0);
    direction /= norm;

    // chord of the unit box through the incumbent: center + t*direction
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index d = 0; d < dims; ++d) {
      if (direction(d) == 0.0) continue;
      const double a = (0.0 - center(d)) / direction(d);
      const double b = (1.0 - center(d)) / direction(d);
      t_lo = std::max(t_lo, std::min(a, b));
      t_hi = std::min(t_hi, std::max(a, b));
    }
    if (!(t_hi > t_lo)) continue;  // degenerate chord, re-draw next epoch

    const auto to_point = [&](double t) -> Vector {
      Vector p = center + t * direction;
      for (Eigen::Index d = 0; d < dims; ++d) p(d) = clip(p(d), 0.0, 1.0);
      return p;
    };
    const auto to_unit = [&](double t) { return (t - t_lo) / (t_hi - t_lo); };

    Matrix grid(cfg.linebo_grid, 1);
    for (int j = 0; j < cfg.linebo_grid; ++j)
      grid(j, 0) = static_cast<double>(j) / static_cast<double>(cfg.linebo_grid - 1);

    Dataset line_data;
    line_data.append(Vector::Constant(1, to_unit(0.0)), inc.value);

    for (int k = 0; k < cfg.linebo_inner && evaluations < cfg.iterations; ++k) {
      Dataset fit_data = line_data;
      winsorize(fit_data.y, cfg);
      const YScaler scaler = YScaler::fit(fit_data.y, cfg.p_min, cfg.standardize);
      for (Eigen::Index i = 0; i < fit_data.size(); ++i)
        fit_data.y(i) = scaler.to_model(fit_data.y(i));
      const GpModel model = GpModel::fit(fit_data, line_spec, cfg.noise_variance);

      const double beta = cfg.beta_at(evaluations + 1);
      const double threshold = scaler.to_model(cfg.p_min);

      BoRecord rec;
      rec.iteration = ++evaluations;
      double unit_pick = to_unit(0.0);
      const auto safe = safe_set(model, grid, beta, threshold, cfg.threads);
      if (safe.empty()) {
        rec.stalled = true;
        rec.params = center;
        const auto [lb, ub] = model.confidence_bounds(Vector::Constant(1, unit_pick), beta);
        (void)ub;
        rec.lower_bound = scaler.to_raw(lb);
      } else {
        Matrix safe_rows(static_cast<Eigen::Index>(safe.size()), 1);
        for (std::size_t i = 0; i < safe.size(); ++i) safe_rows.row(i) = grid.row(safe[i]);
        const Eigen::Index pick = acquire_next(model, safe_rows, cfg.acquisition, beta,
                                               scaler.to_model(best), cfg.threads);
        unit_pick = safe_rows(pick, 0);
        rec.params = to_point(t_lo + unit_pick * (t_hi - t_lo));
        const auto [lb, ub] = model.confidence_bounds(safe_rows.row(pick).transpose(), beta);
        (void)ub;
        rec.lower_bound = scaler.to_raw(lb);
      }

      rec.performance = evaluate_guarded(objective, rec.params, cfg.p_min);
      rec.safe = rec.performance >= cfg.p_min;
      best = std::max(best, rec.performance);
      rec.best_so_far = best;
      data.append(rec.params, rec.performance);
      line_data.append(Vector::Constant(1, unit_pick), rec.performance);
      trace.records.push_back(std::move(rec));
    }
  }

  const Incumbent final_inc = find_incumbent(data, cfg.p_min, /*require_safe=*/false);
  trace.best_params = data.x.row(final_inc.index).transpose();
  trace.best_performance = final_inc.value;
  return trace;
}

KernelSpec standard_kernel_baseline(int dims, const BaseKernelParams& base) {
  if (dims < 1) throw ArgumentError("standard_kernel_baseline: dims must be >= 1");
  std::vector<int> orders{1};
  if (dims > 1) orders.push_back(dims);
  return KernelSpec::make(dims, std::move(orders), base);
}

}  // namespace tuner
