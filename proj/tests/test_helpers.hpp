#pragma once

#include "tuner/kernels.hpp"
#include "tuner/rng.hpp"

#include <vector>

namespace testutil {

/// Exhaustive subset-enumeration evaluation of the order-n additive term:
/// sum over all size-n subsets of the product of z values. Exponential in the
/// input size; test oracle only.
inline double enumerate_symmetric(const std::vector<double>& z, int order) {
  const int d = static_cast<int>(z.size());
  double total = 0.0;
  std::vector<int> pick(order);
  // iterate subsets in lexicographic order
  for (int i = 0; i < order; ++i) pick[i] = i;
  for (;;) {
    double prod = 1.0;
    for (int i : pick) prod *= z[i];
    total += prod;
    int j = order - 1;
    while (j >= 0 && pick[j] == d - order + j) --j;
    if (j < 0) break;
    ++pick[j];
    for (int i = j + 1; i < order; ++i) pick[i] = pick[i - 1] + 1;
  }
  return total;
}

/// Direct evaluation of the additive kernel by enumeration.
inline double enumerate_additive(const tuner::Vector& a, const tuner::Vector& b,
                                 const tuner::KernelSpec& spec) {
  std::vector<double> z;
  for (int d : spec.dims) z.push_back(tuner::base_kernel_eval(a(d), b(d), spec.base, d));
  double k = 0.0;
  for (std::size_t i = 0; i < spec.orders.size(); ++i)
    k += spec.order_weights[i] * enumerate_symmetric(z, spec.orders[i]);
  if (!spec.first_order_only_dims.empty()) {
    double s = 0.0;
    for (int d : spec.first_order_only_dims) s += tuner::base_kernel_eval(a(d), b(d), spec.base, d);
    k += spec.order_weights.front() * s;
  }
  return k;
}

inline tuner::Vector random_point(tuner::RngEngine& eng, int dims) {
  tuner::Vector v(dims);
  for (int d = 0; d < dims; ++d) v(d) = eng.uniform01();
  return v;
}

inline tuner::Matrix random_points(tuner::RngEngine& eng, int n, int dims) {
  tuner::Matrix m(n, dims);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < dims; ++d) m(i, d) = eng.uniform01();
  return m;
}

inline double rel_err(double got, double want) {
  const double denom = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / denom;
}

}  // namespace testutil
