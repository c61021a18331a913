// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/trainers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankfuse/parallel.hpp"

namespace rankfuse {

namespace {

// Lambda and hessian accumulation for one group. Ranks come from the current
// scores (descending, doc_id order on ties); a pair's swap delta only touches
// the two discount slots involved, so it reduces to a closed form.
void group_lambdas(const GroupedVectors& train, std::span<const double> scores, double sigma,
                   std::size_t dcg_cutoff, Gain gain, std::size_t begin, std::size_t end,
                   std::span<double> lambdas, std::span<double> hessians) {
  const std::size_t size = end - begin;
  if (size < 2) return;

  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), begin);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<double> discount(size);
  std::vector<std::size_t> rank_of(size);
  for (std::size_t pos = 0; pos < size; ++pos) {
    rank_of[order[pos] - begin] = pos;
    discount[pos] = pos < dcg_cutoff ? rank_discount(pos + 1) : 0.0;
  }

  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t j = i + 1; j < end; ++j) {
      const int li = train.rows[i].label;
      const int lj = train.rows[j].label;
      if (li == lj) continue;
      const std::size_t hi = li > lj ? i : j;  // the better-labeled document
      const std::size_t lo = li > lj ? j : i;
      const double rho =
          1.0 / (1.0 + std::exp(sigma * (scores[hi] - scores[lo])));
      const double delta_dcg =
          std::abs((gain_value(train.rows[hi].label, gain) -
                    gain_value(train.rows[lo].label, gain)) *
                   (discount[rank_of[hi - begin]] - discount[rank_of[lo - begin]]));
      const double lambda = sigma * rho * delta_dcg;
      const double weight = sigma * sigma * rho * (1.0 - rho) * delta_dcg;
      lambdas[hi] += lambda;
      lambdas[lo] -= lambda;
      hessians[hi] += weight;
      hessians[lo] += weight;
    }
  }
}

void lambdas_impl(const GroupedVectors& train, std::span<const double> scores, double sigma,
                  std::size_t dcg_cutoff, Gain gain, std::span<double> lambdas,
                  std::span<double> hessians, bool parallel) {
  std::fill(lambdas.begin(), lambdas.end(), 0.0);
  std::fill(hessians.begin(), hessians.end(), 0.0);
  const auto groups = static_cast<std::int64_t>(train.num_groups());
  if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(parallel::max_threads())
#endif
    for (std::int64_t g = 0; g < groups; ++g) {
      group_lambdas(train, scores, sigma, dcg_cutoff, gain,
                    train.bounds[static_cast<std::size_t>(g)],
                    train.bounds[static_cast<std::size_t>(g) + 1], lambdas, hessians);
    }
  } else {
    for (std::int64_t g = 0; g < groups; ++g) {
      group_lambdas(train, scores, sigma, dcg_cutoff, gain,
                    train.bounds[static_cast<std::size_t>(g)],
                    train.bounds[static_cast<std::size_t>(g) + 1], lambdas, hessians);
    }
  }
}

}  // namespace

void compute_lambdas(const GroupedVectors& train, std::span<const double> scores, double sigma,
                     std::size_t dcg_cutoff, Gain gain, std::span<double> lambdas,
                     std::span<double> hessians) {
  lambdas_impl(train, scores, sigma, dcg_cutoff, gain, lambdas, hessians, true);
}

void compute_lambdas_serial(const GroupedVectors& train, std::span<const double> scores,
                            double sigma, std::size_t dcg_cutoff, Gain gain,
                            std::span<double> lambdas, std::span<double> hessians) {
  lambdas_impl(train, scores, sigma, dcg_cutoff, gain, lambdas, hessians, false);
}

LmResult train_lambdamart(const GroupedVectors& train, const GroupedVectors* valid,
                          const TrainConfig& config, const FeatureMask& mask) {
  if (train.rows.empty()) throw DataError("lambdamart: empty training set");
  if (mask.count() == 0) throw DataError("lambdamart: no active features");
  if (config.lm.num_trees < 1) throw DataError("lambdamart: num_trees must be >= 1");
  if (!(config.lm.learning_rate > 0.0) || config.lm.learning_rate > 1.0) {
    throw DataError("lambdamart: learning_rate outside (0,1]");
  }

  bool has_pair = false;
  for (std::size_t g = 0; g < train.num_groups() && !has_pair; ++g) {
    for (std::size_t i = train.bounds[g] + 1; i < train.bounds[g + 1]; ++i) {
      if (train.rows[i].label != train.rows[train.bounds[g]].label) {
        has_pair = true;
        break;
      }
    }
  }
  if (!has_pair) throw DataError("lambdamart: no group has two distinct labels");

  const std::size_t n = train.rows.size();
  const GroupedLabels train_labels = train.labels();
  GroupedLabels valid_labels;
  std::vector<double> valid_scores;
  if (valid != nullptr) {
    valid_labels = valid->labels();
    valid_scores.assign(valid->rows.size(), 0.0);
  }

  const TreeFitParams tree_params{config.lm.max_leaves, config.lm.min_leaf_instances};
  std::vector<double> scores(n, 0.0);
  std::vector<double> lambdas(n), hessians(n);

  LmResult result;
  result.model.learning_rate = config.lm.learning_rate;
  double best_valid = 0.0;

  for (int round = 0; round < config.lm.num_trees; ++round) {
    compute_lambdas(train, scores, config.lm.sigma, config.dcg_cutoff, config.gain, lambdas,
                    hessians);

    double max_group_sum = 0.0;
    for (std::size_t g = 0; g < train.num_groups(); ++g) {
      double sum = 0.0;
      for (std::size_t i = train.bounds[g]; i < train.bounds[g + 1]; ++i) sum += lambdas[i];
      max_group_sum = std::max(max_group_sum, std::abs(sum));
    }
    result.max_group_lambda_sum.push_back(max_group_sum);

    RegressionTree tree = fit_regression_tree(train.rows, lambdas, hessians, tree_params, mask);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] += config.lm.learning_rate * tree.evaluate(train.rows[i].values);
    }
    result.model.trees.push_back(std::move(tree));
    result.train_dcg.push_back(
        mean_dcg_grouped(train_labels, scores, config.dcg_cutoff, config.gain));

    if (valid != nullptr) {
      const RegressionTree& added = result.model.trees.back();
      for (std::size_t i = 0; i < valid->rows.size(); ++i) {
        valid_scores[i] += config.lm.learning_rate * added.evaluate(valid->rows[i].values);
      }
      const double vdcg =
          mean_dcg_grouped(valid_labels, valid_scores, config.dcg_cutoff, config.gain);
      result.valid_dcg.push_back(vdcg);
      if (round == 0 || vdcg > best_valid) {
        best_valid = vdcg;
        result.best_round = static_cast<std::size_t>(round);
      } else if (static_cast<std::size_t>(round) - result.best_round >=
                 static_cast<std::size_t>(config.lm.early_stopping_rounds)) {
        break;
      }
    } else {
      result.best_round = static_cast<std::size_t>(round);
    }
  }

  result.model.trees.resize(result.best_round + 1);
  return result;
}

}  // namespace rankfuse
