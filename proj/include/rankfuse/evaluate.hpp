// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_EVALUATE_HPP_
#define RANKFUSE_EVALUATE_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rankfuse/trainers.hpp"

namespace rankfuse {

enum class Algo { kCoordinateAscent, kLambdaMart };

std::string algo_name(Algo algo);
Algo parse_algo(const std::string& name);  // throws DataError on unknown name

struct EvalReport {
  std::vector<std::pair<std::int64_t, double>> per_query;  // ascending qid
  double mean_dcg = 0.0;
  std::size_t query_count = 0;
  std::size_t k = kDefaultDcgCutoff;
  Gain gain = Gain::kExponential;
};

/// Ranks every group with the model and reports per-query and mean DCG@k.
EvalReport evaluate(const Ranker& model, const GroupedVectors& data,
                    std::size_t k = kDefaultDcgCutoff, Gain gain = Gain::kExponential);

// TSV rendering: a header naming k and the gain, one "qid <tab> dcg" row per
// query, and a final summary row with the mean and query count.
std::string eval_report_tsv(const EvalReport& report);

struct AblationGroup {
  std::string name;
  std::vector<int> ids;  // 1-based feature ids
};

struct AblationPlan {
  std::vector<AblationGroup> groups;
};

/// Grouping by feature family: external score, lengths, query frequency,
/// BM25 fields, QLD, TF/IDF/TF-IDF, proximity without and with stopwords.
AblationPlan default_ablation_plan();

struct AblationRow {
  std::string name;
  double mean_dcg = 0.0;
  double delta = 0.0;  // vs baseline; negative means the removal hurt
};

struct AblationReport {
  Algo algo = Algo::kCoordinateAscent;
  double baseline_dcg = 0.0;
  std::vector<AblationRow> rows;  // delta ascending, plan order on ties
  std::vector<std::string> warnings;
  std::size_t k = kDefaultDcgCutoff;
  Gain gain = Gain::kExponential;
};

// Trains a baseline on the union of the plan's feature ids, then retrains
// once per group with that group masked out, all under the same config and
// seed; rows report the validation mean DCG change. A group whose removal
// would leave no features is skipped with a warning.
AblationReport ablation_study(const GroupedVectors& train, const GroupedVectors& valid,
                              const AblationPlan& plan, const TrainConfig& config, Algo algo);

std::string ablation_report_tsv(const AblationReport& report);

}  // namespace rankfuse

#endif  // RANKFUSE_EVALUATE_HPP_
