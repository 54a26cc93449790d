#include "tuner/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tuner {

BaseKernelParams BaseKernelParams::constant(int dims, double ell, double var) {
  BaseKernelParams p;
  p.lengthscale = Vector::Constant(dims, ell);
  p.signal_variance = Vector::Constant(dims, var);
  p.validate();
  return p;
}

void BaseKernelParams::validate() const {
  if (lengthscale.size() == 0 || lengthscale.size() != signal_variance.size())
    throw ArgumentError("base kernel: lengthscale/signal_variance size mismatch");
  if ((lengthscale.array() <= 0.0).any()) throw ArgumentError("base kernel: lengthscale must be > 0");
  if ((signal_variance.array() <= 0.0).any())
    throw ArgumentError("base kernel: signal_variance must be > 0");
}

double default_order_weight(int n_active_dims, int order) {
  return 1.0 / binomial(n_active_dims, order);
}

KernelSpec KernelSpec::make(int ambient_dims, std::vector<int> orders, BaseKernelParams base) {
  KernelSpec s;
  s.dims.resize(ambient_dims);
  for (int d = 0; d < ambient_dims; ++d) s.dims[d] = d;
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  s.orders = std::move(orders);
  s.order_weights.reserve(s.orders.size());
  for (int n : s.orders) s.order_weights.push_back(default_order_weight(ambient_dims, n));
  s.base = std::move(base);
  s.validate();
  return s;
}

KernelSpec KernelSpec::single_order(int ambient_dims, int order, BaseKernelParams base) {
  return make(ambient_dims, {order}, std::move(base));
}

void KernelSpec::validate() const {
  base.validate();
  const int d_ambient = ambient_dims();
  if (dims.empty()) throw ArgumentError("kernel spec: no active dims");
  if (!std::is_sorted(dims.begin(), dims.end())) throw ArgumentError("kernel spec: dims must be ascending");
  std::set<int> seen(dims.begin(), dims.end());
  if (seen.size() != dims.size()) throw ArgumentError("kernel spec: duplicate dims");
  if (*dims.begin() < 0 || dims.back() >= d_ambient)
    throw ArgumentError("kernel spec: dim index out of range");
  if (orders.empty()) throw ArgumentError("kernel spec: orders must be nonempty");
  if (orders.size() != order_weights.size())
    throw ArgumentError("kernel spec: order_weights size mismatch");
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] < 1 || orders[i] > static_cast<int>(dims.size()))
      throw ArgumentError("kernel spec: order out of range 1..|dims|");
    if (i > 0 && orders[i] <= orders[i - 1]) throw ArgumentError("kernel spec: orders must be ascending");
    if (order_weights[i] <= 0.0) throw ArgumentError("kernel spec: order weights must be > 0");
  }
  if (!first_order_only_dims.empty()) {
    if (orders.front() != 1)
      throw ArgumentError("kernel spec: first_order_only_dims requires order 1");
    for (int d : first_order_only_dims) {
      if (d < 0 || d >= d_ambient) throw ArgumentError("kernel spec: first-order dim out of range");
      if (seen.count(d)) throw ArgumentError("kernel spec: first-order dim duplicates an active dim");
    }
  }
}

double base_kernel_eval(double x, double y, const BaseKernelParams& params, int dim) {
  const double r = (x - y) / params.lengthscale[dim];
  return params.signal_variance[dim] * std::exp(-0.5 * r * r);
}

std::vector<double> elementary_symmetric(const std::vector<double>& z, int n_max) {
  const int d = static_cast<int>(z.size());
  if (d < 1) throw ArgumentError("elementary_symmetric: empty input");
  if (n_max < 1 || n_max > d) throw ArgumentError("elementary_symmetric: order out of range");

  // Prefix recursion e_n <- e_n + z_j * e_{n-1}. For the nonnegative inputs
  // produced by base kernels every term is additive, so unlike the
  // Newton-Girard power-sum route there is no cancellation and the result
  // stays within a few ulp of the exact subset sums. Same O(d * n_max) cost.
  std::vector<double> e(n_max + 1, 0.0);
  e[0] = 1.0;
  for (int j = 0; j < d; ++j) {
    const int top = std::min(j + 1, n_max);
    for (int n = top; n >= 1; --n) e[n] += z[j] * e[n - 1];
  }
  return {e.begin() + 1, e.end()};
}

namespace {

double additive_eval_impl(const double* a, const double* b, const KernelSpec& spec,
                          std::vector<double>& z_scratch) {
  z_scratch.clear();
  for (int d : spec.dims) z_scratch.push_back(base_kernel_eval(a[d], b[d], spec.base, d));
  const int n_max = spec.orders.back();
  const std::vector<double> e = elementary_symmetric(z_scratch, n_max);
  double k = 0.0;
  for (std::size_t i = 0; i < spec.orders.size(); ++i) k += spec.order_weights[i] * e[spec.orders[i] - 1];
  if (!spec.first_order_only_dims.empty()) {
    double s = 0.0;
    for (int d : spec.first_order_only_dims) s += base_kernel_eval(a[d], b[d], spec.base, d);
    k += spec.order_weights.front() * s;  // validate() pins orders.front() == 1
  }
  return k;
}

}  // namespace

double additive_kernel_eval(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
                            const KernelSpec& spec) {
  if (a.size() != b.size() || a.size() != spec.ambient_dims())
    throw ArgumentError("additive_kernel_eval: dimension mismatch");
  std::vector<double> z;
  z.reserve(spec.dims.size());
  return additive_eval_impl(a.data(), b.data(), spec, z);
}

Matrix kernel_matrix(const Eigen::Ref<const Matrix>& points, const KernelSpec& spec) {
  const Eigen::Index n = points.rows();
  if (points.cols() != spec.ambient_dims()) throw ArgumentError("kernel_matrix: dimension mismatch");
  Matrix k(n, n);
  // row-major copies keep the per-pair access contiguous
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = points;
  std::vector<double> z;
  z.reserve(spec.dims.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = additive_eval_impl(rows.row(i).data(), rows.row(j).data(), spec, z);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Matrix kernel_cross(const Eigen::Ref<const Matrix>& rows_a, const Eigen::Ref<const Matrix>& rows_b,
                    const KernelSpec& spec) {
  if (rows_a.cols() != spec.ambient_dims() || rows_b.cols() != spec.ambient_dims())
    throw ArgumentError("kernel_cross: dimension mismatch");
  Matrix k(rows_a.rows(), rows_b.rows());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ra = rows_a;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rb = rows_b;
  std::vector<double> z;
  z.reserve(spec.dims.size());
  for (Eigen::Index i = 0; i < ra.rows(); ++i)
    for (Eigen::Index j = 0; j < rb.rows(); ++j)
      k(i, j) = additive_eval_impl(ra.row(i).data(), rb.row(j).data(), spec, z);
  return k;
}

double kernel_diag(const KernelSpec& spec) {
  std::vector<double> z;
  z.reserve(spec.dims.size());
  for (int d : spec.dims) z.push_back(spec.base.signal_variance[d]);
  const std::vector<double> e = elementary_symmetric(z, spec.orders.back());
  double k = 0.0;
  for (std::size_t i = 0; i < spec.orders.size(); ++i) k += spec.order_weights[i] * e[spec.orders[i] - 1];
  if (!spec.first_order_only_dims.empty()) {
    double s = 0.0;
    for (int d : spec.first_order_only_dims) s += spec.base.signal_variance[d];
    k += spec.order_weights.front() * s;
  }
  return k;
}

}  // namespace tuner
