// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rankfuse/parallel.hpp"
#include "rankfuse/util.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rankfuse {

std::size_t RegressionTree::leaf_count() const {
  std::size_t leaves = 0;
  for (const auto& n : nodes) {
    if (n.is_leaf()) ++leaves;
  }
  return leaves;
}

double score_vector(const Ranker& model, const FeatureVector& fv) {
  return std::visit([&](const auto& m) { return m.score(fv.values); }, model);
}

GroupedVectors GroupedVectors::from(std::vector<FeatureVector> vectors) {
  std::stable_sort(vectors.begin(), vectors.end(),
                   [](const FeatureVector& a, const FeatureVector& b) {
                     if (a.qid != b.qid) return a.qid < b.qid;
                     return a.doc_id < b.doc_id;
                   });
  GroupedVectors out;
  out.rows = std::move(vectors);
  out.bounds.push_back(0);
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i].qid != out.rows[i - 1].qid) out.bounds.push_back(i);
  }
  if (!out.rows.empty()) out.bounds.push_back(out.rows.size());
  return out;
}

GroupedLabels GroupedVectors::labels() const {
  GroupedLabels out;
  out.labels.reserve(rows.size());
  for (const auto& fv : rows) out.labels.push_back(fv.label);
  out.bounds = bounds;
  if (out.bounds.empty()) out.bounds.push_back(0);
  return out;
}

std::vector<double> score_all_serial(const Ranker& model, const GroupedVectors& data) {
  std::vector<double> scores(data.rows.size());
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    scores[i] = score_vector(model, data.rows[i]);
  }
  return scores;
}

std::vector<double> score_all(const Ranker& model, const GroupedVectors& data) {
  std::vector<double> scores(data.rows.size());
  const auto n = static_cast<std::int64_t>(data.rows.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(parallel::max_threads())
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    scores[static_cast<std::size_t>(i)] =
        score_vector(model, data.rows[static_cast<std::size_t>(i)]);
  }
  return scores;
}

std::vector<RankedGroup> predict(const Ranker& model, const GroupedVectors& data) {
  const std::vector<double> scores = score_all(model, data);
  std::vector<RankedGroup> out(data.num_groups());
  for (std::size_t g = 0; g < data.num_groups(); ++g) {
    const std::size_t begin = data.bounds[g];
    const std::size_t end = data.bounds[g + 1];
    std::vector<std::size_t> order(end - begin);
    std::iota(order.begin(), order.end(), begin);
    // Rows are doc_id ascending, so stable score sort keeps that tie order.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    RankedGroup& group = out[g];
    group.qid = data.rows[begin].qid;
    group.docs.reserve(order.size());
    for (std::size_t idx : order) {
      group.docs.push_back({data.rows[idx].doc_id, scores[idx], data.rows[idx].label});
    }
  }
  return out;
}

namespace {

void write_tree(std::ostream& out, const RegressionTree& tree, std::size_t index) {
  out << "tree " << index << " nodes " << tree.nodes.size() << '\n';
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TreeNode& n = tree.nodes[i];
    if (n.is_leaf()) {
      out << "node " << i << " leaf " << format_double(n.value) << '\n';
    } else {
      out << "node " << i << " split " << (n.feature + 1) << ' ' << format_double(n.threshold)
          << ' ' << n.left << ' ' << n.right << '\n';
    }
  }
}

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::string next() {
    if (!std::getline(in_, line_)) throw ParseError("unexpected end of model file", line_no_);
    ++line_no_;
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    return line_;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

RegressionTree read_tree(ModelReader& reader, std::size_t expect_index) {
  std::istringstream header(reader.next());
  std::string tree_word, nodes_word;
  std::size_t index = 0, node_count = 0;
  if (!(header >> tree_word >> index >> nodes_word >> node_count) || tree_word != "tree" ||
      nodes_word != "nodes" || index != expect_index || node_count == 0) {
    throw ParseError("expected 'tree " + std::to_string(expect_index) + " nodes <N>'",
                     reader.line_no());
  }
  RegressionTree tree;
  tree.nodes.resize(node_count);
  std::vector<int> referenced(node_count, 0);
  for (std::size_t i = 0; i < node_count; ++i) {
    std::istringstream ls(reader.next());
    std::string node_word, kind;
    std::size_t node_index = 0;
    if (!(ls >> node_word >> node_index >> kind) || node_word != "node" || node_index != i) {
      throw ParseError("expected 'node " + std::to_string(i) + " ...'", reader.line_no());
    }
    TreeNode& n = tree.nodes[i];
    if (kind == "leaf") {
      std::string value_text;
      if (!(ls >> value_text)) throw ParseError("leaf value missing", reader.line_no());
      n.value = parse_double(value_text, reader.line_no());
    } else if (kind == "split") {
      int feature_id = 0;
      std::string threshold_text;
      if (!(ls >> feature_id >> threshold_text >> n.left >> n.right)) {
        throw ParseError("malformed split node", reader.line_no());
      }
      if (feature_id < 1 || feature_id > kNumFeatures) {
        throw ParseError("split feature id " + std::to_string(feature_id) + " outside 1..20",
                         reader.line_no());
      }
      n.feature = feature_id - 1;
      n.threshold = parse_double(threshold_text, reader.line_no());
      // Children are stored after their parent, which also rules out cycles.
      for (int child : {n.left, n.right}) {
        if (child <= static_cast<int>(i) || child >= static_cast<int>(node_count)) {
          throw ParseError("child index " + std::to_string(child) + " out of order",
                           reader.line_no());
        }
        ++referenced[static_cast<std::size_t>(child)];
      }
      if (n.left == n.right) throw ParseError("split children coincide", reader.line_no());
    } else {
      throw ParseError("unknown node kind '" + kind + "'", reader.line_no());
    }
    std::string extra;
    if (ls >> extra) throw ParseError("trailing tokens on node line", reader.line_no());
  }
  for (std::size_t i = 1; i < node_count; ++i) {
    if (referenced[i] != 1) {
      throw ParseError("node " + std::to_string(i) + " referenced " +
                           std::to_string(referenced[i]) + " times",
                       reader.line_no());
    }
  }
  return tree;
}

}  // namespace

void save_model(const Ranker& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << "rankfuse-model v1\n";
  if (const auto* linear = std::get_if<LinearRanker>(&model)) {
    out << "linear\n";
    out << "weights " << kNumFeatures << '\n';
    for (int id = 1; id <= kNumFeatures; ++id) {
      out << id << ' ' << format_double(linear->weights[static_cast<std::size_t>(id - 1)])
          << '\n';
    }
  } else {
    const auto& ensemble = std::get<TreeEnsemble>(model);
    out << "ensemble\n";
    out << "learning_rate " << format_double(ensemble.learning_rate) << '\n';
    out << "trees " << ensemble.trees.size() << '\n';
    for (std::size_t t = 0; t < ensemble.trees.size(); ++t) {
      write_tree(out, ensemble.trees[t], t);
    }
  }
  out << "end\n";
  if (!out) throw DataError("write failed: " + path);
}

Ranker load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  ModelReader reader(in);
  if (reader.next() != "rankfuse-model v1") {
    throw ParseError("bad model header", reader.line_no());
  }
  const std::string kind = reader.next();
  if (kind == "linear") {
    std::istringstream header(reader.next());
    std::string word;
    int count = 0;
    if (!(header >> word >> count) || word != "weights" || count != kNumFeatures) {
      throw ParseError("expected 'weights 20'", reader.line_no());
    }
    LinearRanker linear;
    for (int id = 1; id <= kNumFeatures; ++id) {
      std::istringstream ls(reader.next());
      int got_id = 0;
      std::string weight_text;
      if (!(ls >> got_id >> weight_text) || got_id != id) {
        throw ParseError("expected weight for feature " + std::to_string(id), reader.line_no());
      }
      linear.weights[static_cast<std::size_t>(id - 1)] = parse_double(weight_text, reader.line_no());
    }
    if (reader.next() != "end") throw ParseError("missing end marker", reader.line_no());
    return linear;
  }
  if (kind == "ensemble") {
    TreeEnsemble ensemble;
    {
      std::istringstream ls(reader.next());
      std::string word, lr_text;
      if (!(ls >> word >> lr_text) || word != "learning_rate") {
        throw ParseError("expected learning_rate", reader.line_no());
      }
      ensemble.learning_rate = parse_double(lr_text, reader.line_no());
      if (!(ensemble.learning_rate > 0.0) || ensemble.learning_rate > 1.0) {
        throw ParseError("learning_rate outside (0,1]", reader.line_no());
      }
    }
    std::size_t tree_count = 0;
    {
      std::istringstream ls(reader.next());
      std::string word;
      if (!(ls >> word >> tree_count) || word != "trees") {
        throw ParseError("expected tree count", reader.line_no());
      }
    }
    ensemble.trees.reserve(tree_count);
    for (std::size_t t = 0; t < tree_count; ++t) {
      ensemble.trees.push_back(read_tree(reader, t));
    }
    if (reader.next() != "end") throw ParseError("missing end marker", reader.line_no());
    return ensemble;
  }
  throw ParseError("unknown model kind '" + kind + "'", reader.line_no());
}

}  // namespace rankfuse
