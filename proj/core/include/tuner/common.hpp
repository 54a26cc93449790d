#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tuner {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Invalid arguments or malformed configuration. Maps to CLI exit code 2.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Filesystem and parsing failures. Maps to CLI exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Factorization breakdown, rank collapse and similar. Maps to CLI exit code 4.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double clip(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

/// Binomial coefficient as a double; exact for the small sizes used here.
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// Sum with pairwise recursion; the result depends only on element order,
/// never on how the work was chunked across threads.
inline double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return v.empty() ? 0.0 : pairwise_sum(v.data(), v.size());
}

}  // namespace tuner
