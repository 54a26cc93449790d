#pragma once

#include "tuner/dataset.hpp"
#include "tuner/kernels.hpp"

#include <utility>

namespace tuner {

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;  // clamped at 0 after round-off
};

/// Exact GP regression model. Immutable after fit(); predict and bound
/// queries are const and safe to call from many threads.
class GpModel {
 public:
  /// Factorizes K + noise*I once (lower-triangular, with jitter escalation
  /// 1e-10..1e-6 if the plain factorization fails). Throws NumericalError
  /// when every jitter level fails, listing the attempted levels.
  static GpModel fit(const Dataset& data, KernelSpec spec, double noise_variance);

  Prediction predict(const Eigen::Ref<const Vector>& x) const;

  /// Column-parallel batch prediction; identical to per-point predict.
  std::pair<Vector, Vector> predict_batch(const Eigen::Ref<const Matrix>& points,
                                          int n_threads = 1) const;

  /// (mean - beta*sd, mean + beta*sd)
  std::pair<double, double> confidence_bounds(const Eigen::Ref<const Vector>& x, double beta) const;

  const Matrix& train_x() const { return train_x_; }
  const Vector& train_y() const { return train_y_; }
  const KernelSpec& spec() const { return spec_; }
  double noise_variance() const { return noise_variance_; }
  double jitter() const { return jitter_; }
  const Matrix& chol_lower() const { return chol_lower_; }
  const Vector& alpha() const { return alpha_; }
  Eigen::Index size() const { return train_x_.rows(); }

 private:
  Matrix train_x_;
  Vector train_y_;
  KernelSpec spec_;
  double noise_variance_ = 0.0;
  double jitter_ = 0.0;
  Matrix chol_lower_;
  Vector alpha_;
};

}  // namespace tuner
