#pragma once

#include "tuner/dataset.hpp"
#include "tuner/rng.hpp"

#include <vector>

namespace tuner {

/// Bagged ensemble of CART-style regression trees with variance-reduction
/// splits. Importance per dimension is the normalized total sum-of-squares
/// reduction credited to splits on that dimension (uniform when no split
/// carries signal), and always sums to 1.
struct Forest {
  struct Node {
    int split_dim = -1;        // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf_value = 0.0;
  };
  struct Tree {
    std::vector<Node> nodes;  // nodes[0] is the root
    double predict(const Eigen::Ref<const Vector>& x) const;
  };

  std::vector<Tree> trees;
  Vector importance;

  double predict(const Eigen::Ref<const Vector>& x) const;
};

/// Trains n_trees trees on bootstrap resamples, ceil(D/3) candidate features
/// per split, leaves of at least min_leaf samples. Requires at least
/// 2*min_leaf observations. Trees train in parallel without changing the result.
Forest fit_forest(const Dataset& data, int n_trees, int min_leaf, const RngStream& rng,
                  int n_threads = 1);

}  // namespace tuner
