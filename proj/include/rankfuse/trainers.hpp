// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_TRAINERS_HPP_
#define RANKFUSE_TRAINERS_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "rankfuse/dcg.hpp"
#include "rankfuse/ranker.hpp"
#include "rankfuse/tree_fit.hpp"

namespace rankfuse {

struct CaParams {
  int restarts = 5;
  double tolerance = 1e-6;
  int max_passes = 25;
};

struct LmParams {
  int num_trees = 300;
  int max_leaves = 10;
  double learning_rate = 0.1;
  int min_leaf_instances = 1;
  double sigma = 1.0;
  int early_stopping_rounds = 30;
};

struct TrainConfig {
  CaParams ca;
  LmParams lm;
  std::uint64_t seed = 1;
  std::size_t dcg_cutoff = kDefaultDcgCutoff;
  Gain gain = Gain::kExponential;
};

struct CaResult {
  LinearRanker model;
  double train_dcg = 0.0;
  std::optional<double> valid_dcg;
  // Objective after each accepted step of the winning restart; entry 0 is the
  // starting objective, so the sequence is strictly increasing past it.
  std::vector<double> objective_trace;
  int best_restart = 0;
};

// Direct mean-DCG maximization over linear weights: sweep features in schema
// order, try steps from {+-0.05, +-0.1, +-0.2, +-0.5, +-1, +-2, +-4}, accept
// the best step per feature when it beats the current objective by more than
// the tolerance (ties: smaller magnitude, then negative sign). Restart 0
// starts uniform over active features; later restarts draw seeded
// unit-simplex weights. The best restart wins by validation DCG, falling back
// to training DCG, earliest restart on exact ties.
CaResult train_coordinate_ascent(const GroupedVectors& train, const GroupedVectors* valid,
                                 const TrainConfig& config,
                                 const FeatureMask& mask = FeatureMask::all());

struct LmResult {
  TreeEnsemble model;
  std::vector<double> train_dcg;              // after each boosting round
  std::vector<double> valid_dcg;              // empty without a validation set
  std::vector<double> max_group_lambda_sum;   // max |sum of lambdas| over groups, per round
  std::size_t best_round = 0;                 // model holds trees [0, best_round]
};

// Gradient boosting on lambda gradients: per round and per group, every pair
// with unequal labels contributes sigma/(1+exp(sigma*(s_i-s_j))) weighted by
// |delta DCG@cutoff from swapping the pair in the current ranking|; a
// regression tree is fit to the lambdas (Newton leaf values from the pair
// hessians) and added with the learning rate. With a validation set, stops
// after early_stopping_rounds rounds without improvement and keeps the prefix
// through the best round.
LmResult train_lambdamart(const GroupedVectors& train, const GroupedVectors* valid,
                          const TrainConfig& config, const FeatureMask& mask = FeatureMask::all());

// Per-round gradient kernel, exposed for the parallel-equals-serial contract:
// group slices are disjoint, so the concurrent version is exact.
void compute_lambdas(const GroupedVectors& train, std::span<const double> scores, double sigma,
                     std::size_t dcg_cutoff, Gain gain, std::span<double> lambdas,
                     std::span<double> hessians);
void compute_lambdas_serial(const GroupedVectors& train, std::span<const double> scores,
                            double sigma, std::size_t dcg_cutoff, Gain gain,
                            std::span<double> lambdas, std::span<double> hessians);

}  // namespace rankfuse

#endif  // RANKFUSE_TRAINERS_HPP_
