#pragma once

#include "tuner/common.hpp"

#include <vector>

namespace tuner {

/// Per-dimension squared-exponential hyperparameters, sized to the ambient
/// dimension. All values strictly positive; coordinates live in [0,1].
struct BaseKernelParams {
  Vector lengthscale;
  Vector signal_variance;

  static BaseKernelParams constant(int dims, double ell = 0.2, double var = 1.0);
  int dims() const { return static_cast<int>(lengthscale.size()); }
  void validate() const;
};

/// Composite additive kernel: interaction orders over a set of active
/// dimensions, each order weighted. Dimensions listed in
/// first_order_only_dims participate in the order-1 sum but in no higher
/// interaction; a reduced kernel uses this to keep every dimension observable.
struct KernelSpec {
  std::vector<int> dims;                  // active dims, ascending
  std::vector<int> orders;                // interaction orders, ascending
  std::vector<double> order_weights;      // parallel to orders
  std::vector<int> first_order_only_dims; // disjoint from dims; needs order 1
  BaseKernelParams base;

  /// All dims 0..D-1 active with the given orders and weights 1/C(D,n).
  static KernelSpec make(int ambient_dims, std::vector<int> orders, BaseKernelParams base);
  /// Single-order kernel over all dims, weight 1/C(D,n).
  static KernelSpec single_order(int ambient_dims, int order, BaseKernelParams base);

  int ambient_dims() const { return base.dims(); }
  void validate() const;
};

/// Default per-order weight 1/C(n_active_dims, order): every order then
/// contributes unit prior variance at coincident points with unit signal.
double default_order_weight(int n_active_dims, int order);

/// sigma_d^2 * exp(-(x-y)^2 / (2 ell_d^2))
double base_kernel_eval(double x, double y, const BaseKernelParams& params, int dim);

/// Elementary symmetric polynomials e_1..e_n_max of z, evaluated by the
/// cancellation-free prefix recursion in O(D*n_max).
std::vector<double> elementary_symmetric(const std::vector<double>& z, int n_max);

/// Additive kernel value between two points in [0,1]^D.
double additive_kernel_eval(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
                            const KernelSpec& spec);

/// Gram matrix of the additive kernel over rows of points (n x D).
Matrix kernel_matrix(const Eigen::Ref<const Matrix>& points, const KernelSpec& spec);

/// Cross-covariance matrix: entry (i,j) = k(rows_a[i], rows_b[j]).
Matrix kernel_cross(const Eigen::Ref<const Matrix>& rows_a, const Eigen::Ref<const Matrix>& rows_b,
                    const KernelSpec& spec);

/// Kernel value at coincident points (constant for stationary bases).
double kernel_diag(const KernelSpec& spec);

}  // namespace tuner
