#include "tuner/gp.hpp"

#include "tuner/parallel.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <sstream>

namespace tuner {

GpModel GpModel::fit(const Dataset& data, KernelSpec spec, double noise_variance) {
  if (data.empty()) throw ArgumentError("gp fit: dataset is empty");
  if (noise_variance < 0.0) throw ArgumentError("gp fit: noise_variance must be >= 0");
  spec.validate();
  if (data.dims() != spec.ambient_dims()) throw ArgumentError("gp fit: dataset/kernel dimension mismatch");

  const Eigen::Index n = data.size();
  Matrix k = kernel_matrix(data.x, spec);
  k.diagonal().array() += noise_variance;

  GpModel m;
  m.train_x_ = data.x;
  m.train_y_ = data.y;
  m.spec_ = std::move(spec);
  m.noise_variance_ = noise_variance;

  double jitter = 0.0;
  std::ostringstream tried;
  for (int attempt = 0; attempt <= 5; ++attempt) {
    Matrix a = k;
    if (jitter > 0.0) a.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() == Eigen::Success) {
      // LLT can "succeed" on a numerically singular matrix with a ~sqrt(eps)
      // trailing pivot; such a factor amplifies the solve uncontrollably.
      const Vector diag = Matrix(llt.matrixL()).diagonal();
      const double dmin = diag.minCoeff();
      const double dmax = diag.maxCoeff();
      const double eps = std::numeric_limits<double>::epsilon();
      if (dmin > 0.0 && dmin * dmin > 4.0 * eps * dmax * dmax) {
        m.jitter_ = jitter;
        m.chol_lower_ = llt.matrixL();
        m.alpha_ = llt.solve(m.train_y_);
        return m;
      }
    }
    tried << (attempt ? ", " : "") << jitter;
    jitter = (jitter == 0.0) ? 1e-10 : jitter * 10.0;
  }
  throw NumericalError("gp fit: matrix not positive definite after jitter levels [" + tried.str() +
                       "] on n=" + std::to_string(n));
}

Prediction GpModel::predict(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != spec_.ambient_dims()) throw ArgumentError("gp predict: dimension mismatch");
  Vector k_star(train_x_.rows());
  for (Eigen::Index i = 0; i < train_x_.rows(); ++i)
    k_star(i) = additive_kernel_eval(train_x_.row(i).transpose(), x, spec_);
  Prediction p;
  p.mean = k_star.dot(alpha_);
  Vector w = chol_lower_.triangularView<Eigen::Lower>().solve(k_star);
  p.variance = std::max(0.0, kernel_diag(spec_) - w.squaredNorm());
  return p;
}

std::pair<Vector, Vector> GpModel::predict_batch(const Eigen::Ref<const Matrix>& points,
                                                 int n_threads) const {
  const Eigen::Index m = points.rows();
  Vector means(m), vars(m);
  const double diag = kernel_diag(spec_);
  const Matrix train = train_x_;  // detach from Ref lifetime
  parallel_for(static_cast<std::size_t>(m), n_threads, [&](std::size_t j) {
    const Eigen::Index jj = static_cast<Eigen::Index>(j);
    Vector k_star(train.rows());
    const Vector x = points.row(jj).transpose();
    for (Eigen::Index i = 0; i < train.rows(); ++i)
      k_star(i) = additive_kernel_eval(train.row(i).transpose(), x, spec_);
    means(jj) = k_star.dot(alpha_);
    Vector w = chol_lower_.triangularView<Eigen::Lower>().solve(k_star);
    vars(jj) = std::max(0.0, diag - w.squaredNorm());
  });
  return {std::move(means), std::move(vars)};
}

std::pair<double, double> GpModel::confidence_bounds(const Eigen::Ref<const Vector>& x,
                                                     double beta) const {
  if (beta < 0.0) throw ArgumentError("confidence_bounds: beta must be >= 0");
  const Prediction p = predict(x);
  const double half_width = beta * std::sqrt(p.variance);
  return {p.mean - half_width, p.mean + half_width};
}

}  // namespace tuner
