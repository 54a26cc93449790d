#include "tuner/forest.hpp"

#include "tuner/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tuner {

double Forest::Tree::predict(const Eigen::Ref<const Vector>& x) const {
  int at = 0;
  while (nodes[at].split_dim >= 0)
    at = x(nodes[at].split_dim) <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
  return nodes[at].leaf_value;
}

double Forest::predict(const Eigen::Ref<const Vector>& x) const {
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(x);
  return s / static_cast<double>(trees.size());
}

namespace {

struct SplitChoice {
  int dim = -1;
  double threshold = 0.0;
  double sse_reduction = 0.0;
};

struct TreeBuilder {
  const Matrix& x;
  const Vector& y;
  int min_leaf;
  int features_per_split;
  RngEngine& eng;
  Forest::Tree tree;
  std::vector<double> importance;  // per dim, SSE reduction
  std::vector<std::pair<double, double>> scratch;  // (feature value, target)

  // SSE of targets indexed by [begin, end) given their sum and count.
  static double sse(double sum, double sum_sq, int count) {
    return sum_sq - sum * sum / static_cast<double>(count);
  }

  SplitChoice best_split(const std::vector<int>& idx, const std::vector<int>& feats) {
    const int m = static_cast<int>(idx.size());
    double sum = 0.0, sum_sq = 0.0;
    for (int i : idx) {
      sum += y(i);
      sum_sq += y(i) * y(i);
    }
    const double parent_sse = sse(sum, sum_sq, m);
    SplitChoice best;
    if (parent_sse <= 1e-12 * std::max(1.0, sum_sq)) return best;  // pure node

    for (int d : feats) {
      scratch.clear();
      for (int i : idx) scratch.emplace_back(x(i, d), y(i));
      std::sort(scratch.begin(), scratch.end());
      double left_sum = 0.0, left_sq = 0.0;
      for (int s = 1; s < m; ++s) {
        left_sum += scratch[s - 1].second;
        left_sq += scratch[s - 1].second * scratch[s - 1].second;
        if (s < min_leaf || m - s < min_leaf) continue;
        if (scratch[s].first <= scratch[s - 1].first) continue;  // no boundary between equal values
        const double gain = parent_sse - sse(left_sum, left_sq, s) -
                            sse(sum - left_sum, sum_sq - left_sq, m - s);
        if (gain > best.sse_reduction) {
          best.dim = d;
          best.threshold = 0.5 * (scratch[s - 1].first + scratch[s].first);
          best.sse_reduction = gain;
        }
      }
    }
    return best;
  }

  int build(std::vector<int> idx) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const int m = static_cast<int>(idx.size());
    double mean = 0.0;
    for (int i : idx) mean += y(i);
    mean /= static_cast<double>(m);

    if (m >= 2 * min_leaf) {
      std::vector<int> feats(x.cols());
      std::iota(feats.begin(), feats.end(), 0);
      const int n_pick = std::min<int>(features_per_split, static_cast<int>(feats.size()));
      for (int i = 0; i < n_pick; ++i) {
        const int j = i + static_cast<int>(eng.uniform_below(feats.size() - i));
        std::swap(feats[i], feats[j]);
      }
      feats.resize(n_pick);

      const SplitChoice split = best_split(idx, feats);
      if (split.dim >= 0) {
        importance[split.dim] += split.sse_reduction;
        std::vector<int> left, right;
        for (int i : idx)
          (x(i, split.dim) <= split.threshold ? left : right).push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        const int l = build(std::move(left));
        const int r = build(std::move(right));
        tree.nodes[node_id].split_dim = split.dim;
        tree.nodes[node_id].threshold = split.threshold;
        tree.nodes[node_id].left = l;
        tree.nodes[node_id].right = r;
        return node_id;
      }
    }
    tree.nodes[node_id].leaf_value = mean;
    return node_id;
  }
};

}  // namespace

Forest fit_forest(const Dataset& data, int n_trees, int min_leaf, const RngStream& rng,
                  int n_threads) {
  if (data.empty()) throw ArgumentError("fit_forest: dataset is empty");
  if (n_trees < 1) throw ArgumentError("fit_forest: n_trees must be >= 1");
  if (min_leaf < 1) throw ArgumentError("fit_forest: min_leaf must be >= 1");
  if (data.size() < 2 * min_leaf) throw ArgumentError("fit_forest: need at least 2*min_leaf observations");

  const int n = static_cast<int>(data.size());
  const int dims = static_cast<int>(data.dims());
  const int feats = (dims + 2) / 3;

  Forest forest;
  forest.trees.resize(n_trees);
  std::vector<std::vector<double>> per_tree_importance(n_trees);

  parallel_for(static_cast<std::size_t>(n_trees), n_threads, [&](std::size_t t) {
    RngEngine eng(rng.child(t));
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = static_cast<int>(eng.uniform_below(n));
    TreeBuilder builder{data.x, data.y, min_leaf, feats, eng, {}, std::vector<double>(dims, 0.0), {}};
    builder.build(std::move(idx));
    forest.trees[t] = std::move(builder.tree);
    per_tree_importance[t] = std::move(builder.importance);
  });

  Vector importance = Vector::Zero(dims);
  for (const auto& imp : per_tree_importance)
    for (int d = 0; d < dims; ++d) importance(d) += imp[d];
  const double total = importance.sum();
  if (total <= 0.0)
    importance.setConstant(1.0 / static_cast<double>(dims));
  else
    importance /= total;
  forest.importance = std::move(importance);
  return forest;
}

}  // namespace tuner
