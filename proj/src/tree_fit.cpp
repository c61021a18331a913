// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/tree_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankfuse/parallel.hpp"

namespace rankfuse {

FeatureMask FeatureMask::without(const std::vector<int>& ids) {
  FeatureMask m = all();
  for (int id : ids) {
    if (id < 1 || id > kNumFeatures) {
      throw DataError("feature id " + std::to_string(id) + " outside 1..20");
    }
    m.active[static_cast<std::size_t>(id - 1)] = false;
  }
  return m;
}

int FeatureMask::count() const {
  return static_cast<int>(std::count(active.begin(), active.end(), true));
}

namespace {

constexpr double kNewtonEps = 1e-10;

struct SplitCandidate {
  bool valid = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;  // SSE drop; larger is better
};

struct BuildNode {
  std::size_t begin = 0;  // range into the shared index array
  std::size_t end = 0;
  double target_sum = 0.0;
  double hessian_sum = 0.0;
  SplitCandidate split;
};

// Best split of one node restricted to one feature. scratch holds
// (value, target) pairs and is reused across calls.
SplitCandidate best_split_for_feature(std::span<const FeatureVector> rows,
                                      std::span<const double> targets,
                                      std::span<const std::size_t> node_rows, int feature,
                                      double target_sum, int min_leaf,
                                      std::vector<std::pair<double, double>>& scratch) {
  SplitCandidate best;
  const std::size_t n = node_rows.size();
  scratch.clear();
  scratch.reserve(n);
  const auto f = static_cast<std::size_t>(feature);
  for (std::size_t row : node_rows) {
    scratch.emplace_back(rows[row].values[f], targets[row]);
  }
  std::sort(scratch.begin(), scratch.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const double parent_term = target_sum * target_sum / static_cast<double>(n);
  double left_sum = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    left_sum += scratch[i].second;
    const double lo = scratch[i].first;
    const double hi = scratch[i + 1].first;
    if (lo == hi) continue;
    const auto left_n = static_cast<double>(i + 1);
    const auto right_n = static_cast<double>(n - i - 1);
    if (left_n < min_leaf || right_n < min_leaf) continue;
    double threshold = lo + (hi - lo) / 2.0;
    // Rounding can push the midpoint onto hi; fall back to the left value so
    // the <= test still separates the two sides.
    if (threshold >= hi) threshold = lo;
    const double right_sum = target_sum - left_sum;
    const double gain =
        left_sum * left_sum / left_n + right_sum * right_sum / right_n - parent_term;
    if (!best.valid || gain > best.gain ||
        (gain == best.gain && threshold < best.threshold)) {
      best.valid = true;
      best.feature = feature;
      best.threshold = threshold;
      best.gain = gain;
    }
  }
  return best;
}

SplitCandidate best_split(std::span<const FeatureVector> rows, std::span<const double> targets,
                          std::span<const std::size_t> node_rows, double target_sum,
                          const TreeFitParams& params, const FeatureMask& mask, bool parallel) {
  if (node_rows.size() < 2 * static_cast<std::size_t>(params.min_leaf_instances)) return {};
  std::array<SplitCandidate, kNumFeatures> per_feature;
  if (parallel) {
    const int threads = parallel::max_threads();
#ifdef _OPENMP
#pragma omp parallel num_threads(threads)
#endif
    {
      std::vector<std::pair<double, double>> scratch;
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
      for (int f = 0; f < kNumFeatures; ++f) {
        if (mask.active[static_cast<std::size_t>(f)]) {
          per_feature[static_cast<std::size_t>(f)] = best_split_for_feature(
              rows, targets, node_rows, f, target_sum, params.min_leaf_instances, scratch);
        }
      }
    }
  } else {
    std::vector<std::pair<double, double>> scratch;
    for (int f = 0; f < kNumFeatures; ++f) {
      if (mask.active[static_cast<std::size_t>(f)]) {
        per_feature[static_cast<std::size_t>(f)] = best_split_for_feature(
            rows, targets, node_rows, f, target_sum, params.min_leaf_instances, scratch);
      }
    }
  }
  // Ascending id with a strict comparison keeps the smaller feature on ties.
  SplitCandidate best;
  for (const SplitCandidate& c : per_feature) {
    if (c.valid && (!best.valid || c.gain > best.gain)) best = c;
  }
  return best;
}

RegressionTree fit_tree_impl(std::span<const FeatureVector> rows, std::span<const double> targets,
                             std::span<const double> hessians, const TreeFitParams& params,
                             const FeatureMask& mask, bool parallel) {
  if (rows.empty()) throw DataError("cannot fit a tree on zero rows");
  if (rows.size() != targets.size() || rows.size() != hessians.size()) {
    throw DataError("tree fit: rows, targets and hessians must align");
  }
  if (params.max_leaves < 2) throw DataError("max_leaves must be at least 2");
  if (params.min_leaf_instances < 1) throw DataError("min_leaf_instances must be at least 1");
  if (mask.count() == 0) throw DataError("feature mask leaves no feature active");

  std::vector<std::size_t> index(rows.size());
  std::iota(index.begin(), index.end(), std::size_t{0});

  RegressionTree tree;
  std::vector<BuildNode> build;
  auto make_node = [&](std::size_t begin, std::size_t end) {
    BuildNode node;
    node.begin = begin;
    node.end = end;
    for (std::size_t i = begin; i < end; ++i) {
      node.target_sum += targets[index[i]];
      node.hessian_sum += hessians[index[i]];
    }
    node.split = best_split(rows, targets, {index.data() + begin, end - begin}, node.target_sum,
                            params, mask, parallel);
    build.push_back(node);
    tree.nodes.emplace_back();
    return static_cast<int>(build.size() - 1);
  };

  make_node(0, rows.size());
  int leaves = 1;
  while (leaves < params.max_leaves) {
    // Earlier-created leaves win gain ties, hence the strict > scan.
    int pick = -1;
    for (std::size_t i = 0; i < build.size(); ++i) {
      const BuildNode& n = build[i];
      if (!tree.nodes[i].is_leaf() || !n.split.valid) continue;
      if (pick < 0 || n.split.gain > build[static_cast<std::size_t>(pick)].split.gain) {
        pick = static_cast<int>(i);
      }
    }
    if (pick < 0) break;

    BuildNode& parent = build[static_cast<std::size_t>(pick)];
    const int feature = parent.split.feature;
    const double threshold = parent.split.threshold;
    const auto split_point = std::stable_partition(
        index.begin() + static_cast<std::ptrdiff_t>(parent.begin),
        index.begin() + static_cast<std::ptrdiff_t>(parent.end), [&](std::size_t row) {
          return rows[row].values[static_cast<std::size_t>(feature)] <= threshold;
        });
    const auto mid = static_cast<std::size_t>(split_point - index.begin());
    const std::size_t begin = parent.begin;
    const std::size_t end = parent.end;

    const int left = make_node(begin, mid);
    const int right = make_node(mid, end);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(pick)];
    node.feature = feature;
    node.threshold = threshold;
    node.left = left;
    node.right = right;
    ++leaves;
  }

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].is_leaf()) {
      const BuildNode& n = build[i];
      tree.nodes[i].value =
          n.hessian_sum == 0.0 ? 0.0 : n.target_sum / (n.hessian_sum + kNewtonEps);
    }
  }
  return tree;
}

}  // namespace

RegressionTree fit_regression_tree(std::span<const FeatureVector> rows,
                                   std::span<const double> targets,
                                   std::span<const double> hessians, const TreeFitParams& params,
                                   const FeatureMask& mask) {
  return fit_tree_impl(rows, targets, hessians, params, mask, true);
}

RegressionTree fit_regression_tree_serial(std::span<const FeatureVector> rows,
                                          std::span<const double> targets,
                                          std::span<const double> hessians,
                                          const TreeFitParams& params, const FeatureMask& mask) {
  return fit_tree_impl(rows, targets, hessians, params, mask, false);
}

}  // namespace rankfuse
