// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_RANKER_HPP_
#define RANKFUSE_RANKER_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rankfuse/dcg.hpp"
#include "rankfuse/features.hpp"

namespace rankfuse {

struct LinearRanker {
  std::array<double, kNumFeatures> weights{};

  double score(const std::array<double, kNumFeatures>& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < kNumFeatures; ++i) s += weights[i] * x[i];
    return s;
  }
};

// Nodes live in one vector; children are created after their parent, so child
// indices always exceed the parent index. feature == -1 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double evaluate(const std::array<double, kNumFeatures>& x) const {
    int at = 0;
    while (!nodes[static_cast<std::size_t>(at)].is_leaf()) {
      const TreeNode& n = nodes[static_cast<std::size_t>(at)];
      at = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(at)].value;
  }

  std::size_t leaf_count() const;
};

struct TreeEnsemble {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;

  double score(const std::array<double, kNumFeatures>& x) const {
    double s = 0.0;
    for (const auto& t : trees) s += learning_rate * t.evaluate(x);
    return s;
  }
};

using Ranker = std::variant<LinearRanker, TreeEnsemble>;

double score_vector(const Ranker& model, const FeatureVector& fv);

// Feature vectors sorted by (qid, ascending doc_id) and bucketed into
// contiguous per-qid groups; group g spans rows [bounds[g], bounds[g+1]).
// The doc_id sort doubles as the ranking tie key.
struct GroupedVectors {
  std::vector<FeatureVector> rows;
  std::vector<std::size_t> bounds;

  static GroupedVectors from(std::vector<FeatureVector> vectors);

  std::size_t num_groups() const { return bounds.empty() ? 0 : bounds.size() - 1; }
  GroupedLabels labels() const;
};

// Model scores for every row, in row order. Reads are independent so the
// parallel version writes disjoint slots; results match the serial one
// bit for bit.
std::vector<double> score_all(const Ranker& model, const GroupedVectors& data);
std::vector<double> score_all_serial(const Ranker& model, const GroupedVectors& data);

struct RankedDoc {
  std::string doc_id;
  double score = 0.0;
  int label = 0;
};

struct RankedGroup {
  std::int64_t qid = 0;
  std::vector<RankedDoc> docs;
};

// Per-group rankings: descending score, ties by ascending doc_id.
std::vector<RankedGroup> predict(const Ranker& model, const GroupedVectors& data);

// Versioned text grammar, exact decimal round trip:
//   rankfuse-model v1
//   linear
//   weights 20
//   <id> <weight>            (ids 1..20)
//   end
// or
//   rankfuse-model v1
//   ensemble
//   learning_rate <lr>
//   trees <T>
//   tree <t> nodes <N>
//   node <i> split <feature_id> <threshold> <left> <right>
//   node <i> leaf <value>
//   end
void save_model(const Ranker& model, const std::string& path);
Ranker load_model(const std::string& path);

}  // namespace rankfuse

#endif  // RANKFUSE_RANKER_HPP_
