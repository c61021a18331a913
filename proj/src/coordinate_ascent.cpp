// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/trainers.hpp"

#include <cmath>
#include <random>

#include "rankfuse/rng.hpp"

namespace rankfuse {

namespace {

constexpr double kStepGrid[] = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0};

std::array<double, kNumFeatures> initial_weights(const FeatureMask& mask, int restart,
                                                 std::uint64_t seed) {
  std::array<double, kNumFeatures> w{};
  const int active = mask.count();
  if (restart == 0) {
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      if (mask.active[f]) w[f] = 1.0 / active;
    }
    return w;
  }
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(restart)));
  double total = 0.0;
  for (std::size_t f = 0; f < kNumFeatures; ++f) {
    if (!mask.active[f]) continue;
    // Normalized exponentials are uniform on the simplex.
    w[f] = -std::log1p(-uniform01(rng));
    total += w[f];
  }
  if (total <= 0.0) return initial_weights(mask, 0, seed);
  for (std::size_t f = 0; f < kNumFeatures; ++f) w[f] /= total;
  return w;
}

struct RestartOutcome {
  LinearRanker model;
  double train_dcg = 0.0;
  std::vector<double> trace;
};

RestartOutcome run_restart(const GroupedVectors& train, const GroupedLabels& labels,
                           const TrainConfig& config, const FeatureMask& mask, int restart) {
  const std::size_t n = train.rows.size();
  LinearRanker model;
  model.weights = initial_weights(mask, restart, config.seed);

  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) scores[i] = model.score(train.rows[i].values);
  std::vector<double> candidate(n);

  double objective = mean_dcg_grouped(labels, scores, config.dcg_cutoff, config.gain);
  RestartOutcome out;
  out.trace.push_back(objective);

  for (int pass = 0; pass < config.ca.max_passes; ++pass) {
    bool accepted_any = false;
    for (std::size_t f = 0; f < kNumFeatures; ++f) {
      if (!mask.active[f]) continue;
      double best_objective = objective;
      double best_delta = 0.0;
      for (double magnitude : kStepGrid) {
        // Negative first, so exact ties resolve to the smaller magnitude and
        // then the negative sign on first strict improvement.
        for (double delta : {-magnitude, magnitude}) {
          for (std::size_t i = 0; i < n; ++i) {
            candidate[i] = scores[i] + delta * train.rows[i].values[f];
          }
          const double obj = mean_dcg_grouped(labels, candidate, config.dcg_cutoff, config.gain);
          if (obj > best_objective) {
            best_objective = obj;
            best_delta = delta;
          }
        }
      }
      if (best_delta != 0.0 && best_objective > objective + config.ca.tolerance) {
        model.weights[f] += best_delta;
        for (std::size_t i = 0; i < n; ++i) scores[i] += best_delta * train.rows[i].values[f];
        objective = best_objective;
        out.trace.push_back(objective);
        accepted_any = true;
      }
    }
    if (!accepted_any) break;
  }
  out.model = model;
  out.train_dcg = objective;
  return out;
}

}  // namespace

CaResult train_coordinate_ascent(const GroupedVectors& train, const GroupedVectors* valid,
                                 const TrainConfig& config, const FeatureMask& mask) {
  if (train.rows.empty()) throw DataError("coordinate ascent: empty training set");
  if (mask.count() == 0) throw DataError("coordinate ascent: no active features");
  if (config.ca.restarts < 1) throw DataError("coordinate ascent: restarts must be >= 1");

  const GroupedLabels train_labels = train.labels();
  GroupedLabels valid_labels;
  if (valid != nullptr) valid_labels = valid->labels();

  auto selection_metric = [&](const RestartOutcome& outcome) {
    if (valid == nullptr) return outcome.train_dcg;
    const Ranker as_ranker = outcome.model;
    const std::vector<double> valid_scores = score_all(as_ranker, *valid);
    return mean_dcg_grouped(valid_labels, valid_scores, config.dcg_cutoff, config.gain);
  };

  CaResult result;
  double best_metric = 0.0;
  std::optional<double> best_valid;
  for (int restart = 0; restart < config.ca.restarts; ++restart) {
    RestartOutcome outcome = run_restart(train, train_labels, config, mask, restart);
    const double metric = selection_metric(outcome);
    if (restart == 0 || metric > best_metric) {
      best_metric = metric;
      if (valid != nullptr) best_valid = metric;
      result.model = outcome.model;
      result.train_dcg = outcome.train_dcg;
      result.objective_trace = std::move(outcome.trace);
      result.best_restart = restart;
    }
  }
  result.valid_dcg = best_valid;
  return result;
}

}  // namespace rankfuse
