#include "tuner/sampling.hpp"

#include <numeric>
#include <vector>

namespace tuner {

Matrix latin_hypercube(int n, int dims, const RngStream& rng) {
  if (n < 1 || dims < 1) throw ArgumentError("latin_hypercube: n and dims must be >= 1");
  RngEngine eng(rng);
  Matrix points(n, dims);
  std::vector<int> strata(n);
  for (int d = 0; d < dims; ++d) {
    std::iota(strata.begin(), strata.end(), 0);
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(eng.uniform_below(static_cast<std::uint64_t>(i) + 1));
      std::swap(strata[i], strata[j]);
    }
    for (int i = 0; i < n; ++i)
      points(i, d) = (static_cast<double>(strata[i]) + eng.uniform01()) / static_cast<double>(n);
  }
  return points;
}

Matrix candidate_batch(const Eigen::Ref<const Vector>& center, int n_uniform, int n_local,
                       double local_sigma, const RngStream& rng) {
  const Eigen::Index dims = center.size();
  if (dims < 1) throw ArgumentError("candidate_batch: empty center");
  if (n_uniform < 0 || n_local < 0) throw ArgumentError("candidate_batch: negative counts");
  if (n_local > 0 && local_sigma <= 0.0) throw ArgumentError("candidate_batch: local_sigma must be > 0");
  if ((center.array() < 0.0).any() || (center.array() > 1.0).any())
    throw ArgumentError("candidate_batch: center outside unit box");

  RngEngine eng(rng);
  Matrix points(n_uniform + n_local, dims);
  for (int i = 0; i < n_uniform; ++i)
    for (Eigen::Index d = 0; d < dims; ++d) points(i, d) = eng.uniform01();
  for (int i = 0; i < n_local; ++i)
    for (Eigen::Index d = 0; d < dims; ++d)
      points(n_uniform + i, d) = clip(center(d) + local_sigma * eng.normal(), 0.0, 1.0);
  return points;
}

}  // namespace tuner
