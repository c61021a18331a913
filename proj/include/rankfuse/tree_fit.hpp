// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_TREE_FIT_HPP_
#define RANKFUSE_TREE_FIT_HPP_

#include <array>
#include <span>
#include <vector>

#include "rankfuse/ranker.hpp"

namespace rankfuse {

/// Which of the 20 feature slots a trainer may touch.
struct FeatureMask {
  std::array<bool, kNumFeatures> active{};

  static FeatureMask all() {
    FeatureMask m;
    m.active.fill(true);
    return m;
  }

  // Mask with the given 1-based feature ids switched off.
  static FeatureMask without(const std::vector<int>& ids);

  int count() const;
  bool operator==(const FeatureMask&) const = default;
};

struct TreeFitParams {
  int max_leaves = 10;
  int min_leaf_instances = 1;
};

// Fits a regression tree to per-row targets by best-first growth: repeatedly
// split the leaf whose best split gives the largest drop in sum of squared
// error, until max_leaves leaves or no leaf has a valid split. Candidate
// thresholds are midpoints of consecutive distinct sorted feature values;
// equal-gain ties prefer the earlier-created leaf, then the smaller feature
// id, then the smaller threshold. Leaf outputs are the Newton step
// sum(targets) / (sum(hessians) + 1e-10), or 0 when the hessian sum is 0.
//
// The parallel version searches features concurrently and reduces per-feature
// candidates in ascending id order, so it matches the serial fit exactly.
RegressionTree fit_regression_tree(std::span<const FeatureVector> rows,
                                   std::span<const double> targets,
                                   std::span<const double> hessians, const TreeFitParams& params,
                                   const FeatureMask& mask);
RegressionTree fit_regression_tree_serial(std::span<const FeatureVector> rows,
                                          std::span<const double> targets,
                                          std::span<const double> hessians,
                                          const TreeFitParams& params, const FeatureMask& mask);

}  // namespace rankfuse

#endif  // RANKFUSE_TREE_FIT_HPP_
