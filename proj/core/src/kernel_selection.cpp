#include "tuner/kernel_selection.hpp"

#include "tuner/parallel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tuner {

NystromConfig NystromConfig::resolved(Eigen::Index dataset_size) const {
  NystromConfig r = *this;
  const double l = static_cast<double>(dataset_size);
  if (r.c <= 0) r.c = static_cast<int>(std::ceil(0.8 * l));
  if (r.k <= 0) r.k = r.c;
  r.validate(dataset_size);
  return r;
}

void NystromConfig::validate(Eigen::Index dataset_size) const {
  if (mu <= 0.0) throw ArgumentError("nystrom: mu must be > 0");
  if (trials < 1) throw ArgumentError("nystrom: trials must be >= 1");
  if (k < 1 || k > c) throw ArgumentError("nystrom: need 1 <= k <= c");
  if (c > dataset_size) throw ArgumentError("nystrom: c exceeds dataset size");
}

double nystrom_cree_with_indices(const Dataset& data, const KernelSpec& spec, double mu, int rank,
                                 const std::vector<int>& indices) {
  const Eigen::Index l = data.size();
  const int c = static_cast<int>(indices.size());
  if (c < 1 || c > l) throw ArgumentError("nystrom: index set size out of range");
  if (rank < 1 || rank > c) throw ArgumentError("nystrom: need 1 <= k <= c");
  if (mu <= 0.0) throw ArgumentError("nystrom: mu must be > 0");

  Matrix sampled(c, data.dims());
  for (int t = 0; t < c; ++t) sampled.row(t) = data.x.row(indices[t]);
  const Matrix c_mat = kernel_cross(data.x, sampled, spec);  // l x c
  Matrix w(c, c);
  for (int s = 0; s < c; ++s) w.row(s) = c_mat.row(indices[s]);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(w);
  if (eig.info() != Eigen::Success) throw NumericalError("nystrom: eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();  // ascending
  const double lambda_max = lambda(c - 1);
  const double cutoff = 1e-12 * lambda_max;
  if (!(lambda_max > 0.0)) throw NumericalError("nystrom: rank collapse, spectrum not positive");

  // top `rank` spectral components above the pseudo-inverse cutoff
  std::vector<int> kept;
  for (int j = c - 1; j >= c - rank; --j)
    if (lambda(j) > cutoff) kept.push_back(j);
  if (kept.empty()) throw NumericalError("nystrom: rank collapse, all kept eigenvalues below cutoff");

  Matrix v(l, static_cast<int>(kept.size()));
  for (std::size_t a = 0; a < kept.size(); ++a)
    v.col(a) = c_mat * eig.eigenvectors().col(kept[a]) / std::sqrt(lambda(kept[a]));

  Matrix lhs = v.transpose() * v;
  lhs.diagonal().array() += mu;
  const Vector t_vec = Eigen::LLT<Matrix>(lhs).solve(v.transpose() * data.y);
  const Vector u = (data.y - v * t_vec) / (mu * static_cast<double>(l));
  return mu * data.y.dot(u);
}

double nystrom_cree(const Dataset& data, const KernelSpec& spec, const NystromConfig& cfg,
                    const RngStream& rng) {
  if (data.empty()) throw ArgumentError("nystrom: dataset is empty");
  const NystromConfig rc = cfg.resolved(data.size());

  // partial Fisher-Yates draw of c indices without replacement
  RngEngine eng(rng);
  const int l = static_cast<int>(data.size());
  std::vector<int> pool(l);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < rc.c; ++i) {
    const int j = i + static_cast<int>(eng.uniform_below(static_cast<std::uint64_t>(l - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(rc.c);
  return nystrom_cree_with_indices(data, spec, rc.mu, rc.k, pool);
}

KernelRanking rank_additive_kernels(const Dataset& data, int dims, const BaseKernelParams& base,
                                    const NystromConfig& cfg, int top_m, const RngStream& rng,
                                    int n_threads) {
  if (data.empty()) throw ArgumentError("rank_additive_kernels: dataset is empty");
  if (dims < 1 || data.dims() != dims) throw ArgumentError("rank_additive_kernels: dimension mismatch");
  if (top_m < 1 || top_m > dims) throw ArgumentError("rank_additive_kernels: top_m out of range");
  const NystromConfig rc = cfg.resolved(data.size());

  KernelRanking ranking;
  ranking.trials = rc.trials;
  ranking.avg_cree.resize(dims, 0.0);
  for (int order = 1; order <= dims; ++order) {
    const KernelSpec spec = KernelSpec::single_order(dims, order, base);
    const RngStream order_stream = rng.child(static_cast<std::uint64_t>(order));
    std::vector<double> trial_values(rc.trials, 0.0);
    parallel_for(static_cast<std::size_t>(rc.trials), n_threads, [&](std::size_t t) {
      trial_values[t] = nystrom_cree(data, spec, rc, order_stream.child(t));
    });
    ranking.avg_cree[order - 1] = pairwise_sum(trial_values) / static_cast<double>(rc.trials);
  }

  ranking.sorted_orders.resize(dims);
  std::iota(ranking.sorted_orders.begin(), ranking.sorted_orders.end(), 1);
  std::stable_sort(ranking.sorted_orders.begin(), ranking.sorted_orders.end(),
                   [&](int a, int b) {
                     const double va = ranking.avg_cree[a - 1];
                     const double vb = ranking.avg_cree[b - 1];
                     return va < vb || (va == vb && a < b);  // ties: cheaper kernel wins
                   });
  ranking.selected.assign(ranking.sorted_orders.begin(), ranking.sorted_orders.begin() + top_m);
  std::sort(ranking.selected.begin(), ranking.selected.end());
  return ranking;
}

KernelSpec build_reduced_kernel(const KernelRanking& ranking, const Forest& forest, int dims,
                                const BaseKernelParams& base, int dim_keep) {
  if (dim_keep < 1 || dim_keep > dims) throw ArgumentError("build_reduced_kernel: dim_keep out of range");
  if (forest.importance.size() != dims)
    throw ArgumentError("build_reduced_kernel: forest dimension mismatch");

  std::vector<int> by_importance(dims);
  std::iota(by_importance.begin(), by_importance.end(), 0);
  std::stable_sort(by_importance.begin(), by_importance.end(), [&](int a, int b) {
    return forest.importance(a) > forest.importance(b) ||
           (forest.importance(a) == forest.importance(b) && a < b);
  });

  KernelSpec spec;
  spec.base = base;
  spec.dims.assign(by_importance.begin(), by_importance.begin() + dim_keep);
  std::sort(spec.dims.begin(), spec.dims.end());
  spec.first_order_only_dims.assign(by_importance.begin() + dim_keep, by_importance.end());
  std::sort(spec.first_order_only_dims.begin(), spec.first_order_only_dims.end());

  std::vector<int> orders{1};
  for (int n : ranking.selected) orders.push_back(std::min(n, dim_keep));
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  spec.orders = std::move(orders);

  spec.order_weights.reserve(spec.orders.size());
  for (int n : spec.orders) {
    // the first-order sum spans every dimension, higher orders only dim_keep
    const int span = (n == 1) ? dims : dim_keep;
    spec.order_weights.push_back(default_order_weight(span, n));
  }
  spec.validate();
  return spec;
}

}  // namespace tuner
