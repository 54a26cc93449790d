#pragma once

#include "tuner/dataset.hpp"
#include "tuner/forest.hpp"
#include "tuner/kernels.hpp"
#include "tuner/rng.hpp"

#include <vector>

namespace tuner {

struct NystromConfig {
  // The column subsample (c < l) is what discriminates kernels: each kernel
  // is scored on how well its landmark approximation reconstructs the
  // targets on the full set. Rank truncation below c blurs the ranking
  // toward order 1, so k defaults to c.
  int c = 0;          // sampled column count (0: use ceil(0.8*l))
  int k = 0;          // truncation rank (0: use c)
  double mu = 1e-1;   // regularization
  int trials = 1000;  // repetitions averaged per kernel

  NystromConfig resolved(Eigen::Index dataset_size) const;
  void validate(Eigen::Index dataset_size) const;
};

struct KernelRanking {
  std::vector<double> avg_cree;     // indexed by order-1, one entry per order 1..D
  std::vector<int> sorted_orders;   // ascending average C_ree, ties to the lower order
  std::vector<int> selected;        // top_m head of sorted_orders, ascending
  int trials = 0;
};

/// Regularized empirical error of the rank-k Nystrom approximation of the
/// kernel built from spec, for one random column sample. Lower is better.
double nystrom_cree(const Dataset& data, const KernelSpec& spec, const NystromConfig& cfg,
                    const RngStream& rng);

/// Same computation with the sampled index set supplied by the caller.
double nystrom_cree_with_indices(const Dataset& data, const KernelSpec& spec, double mu, int rank,
                                 const std::vector<int>& indices);

/// Averages nystrom_cree over cfg.trials independent streams for every
/// single-order additive kernel of order 1..dims and ranks the orders.
KernelRanking rank_additive_kernels(const Dataset& data, int dims, const BaseKernelParams& base,
                                    const NystromConfig& cfg, int top_m, const RngStream& rng,
                                    int n_threads = 1);

/// Composite kernel from the ranking: the dim_keep most important dimensions
/// carry the selected interaction orders (capped at dim_keep); a first-order
/// term stays on over all dimensions so none is excluded outright.
KernelSpec build_reduced_kernel(const KernelRanking& ranking, const Forest& forest, int dims,
                                const BaseKernelParams& base, int dim_keep);

}  // namespace tuner
