// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/evaluate.hpp"

#include <algorithm>

#include "rankfuse/util.hpp"

namespace rankfuse {

std::string algo_name(Algo algo) {
  return algo == Algo::kCoordinateAscent ? "ca" : "lambdamart";
}

Algo parse_algo(const std::string& name) {
  if (name == "ca") return Algo::kCoordinateAscent;
  if (name == "lambdamart") return Algo::kLambdaMart;
  throw DataError("unknown algorithm '" + name + "' (expected ca or lambdamart)");
}

EvalReport evaluate(const Ranker& model, const GroupedVectors& data, std::size_t k, Gain gain) {
  if (data.rows.empty()) throw DataError("evaluate: empty dataset");
  EvalReport report;
  report.k = k;
  report.gain = gain;
  const std::vector<double> scores = score_all(model, data);
  std::vector<double> per_group;
  const GroupedLabels labels = data.labels();
  report.mean_dcg = mean_dcg_grouped(labels, scores, k, gain, &per_group);
  report.query_count = data.num_groups();
  report.per_query.reserve(per_group.size());
  for (std::size_t g = 0; g < per_group.size(); ++g) {
    report.per_query.emplace_back(data.rows[data.bounds[g]].qid, per_group[g]);
  }
  return report;
}

std::string eval_report_tsv(const EvalReport& report) {
  std::string out = "# dcg@" + std::to_string(report.k) + " gain=" + gain_name(report.gain) + "\n";
  out += "qid\tdcg\n";
  for (const auto& [qid, dcg] : report.per_query) {
    out += std::to_string(qid);
    out += '\t';
    out += format_double(dcg);
    out += '\n';
  }
  out += "mean\t" + format_double(report.mean_dcg) + "\tqueries=" +
         std::to_string(report.query_count) + "\n";
  return out;
}

AblationPlan default_ablation_plan() {
  return {{
      {"external_score", {1}},
      {"lengths", {2, 3, 4}},
      {"query_freq", {5}},
      {"bm25", {6, 8, 9}},
      {"qld", {7}},
      {"tf_idf", {10, 11, 12}},
      {"prox_stop", {13, 14, 15, 16}},
      {"prox_nonstop", {17, 18, 19, 20}},
  }};
}

AblationReport ablation_study(const GroupedVectors& train, const GroupedVectors& valid,
                              const AblationPlan& plan, const TrainConfig& config, Algo algo) {
  if (plan.groups.empty()) throw DataError("ablation: empty plan");
  std::array<bool, kNumFeatures> in_plan{};
  for (const auto& group : plan.groups) {
    if (group.ids.empty()) throw DataError("ablation: group '" + group.name + "' has no ids");
    for (int id : group.ids) {
      if (id < 1 || id > kNumFeatures) {
        throw DataError("ablation: feature id " + std::to_string(id) + " outside 1..20");
      }
      auto& slot = in_plan[static_cast<std::size_t>(id - 1)];
      if (slot) {
        throw DataError("ablation: feature id " + std::to_string(id) +
                        " appears in more than one group");
      }
      slot = true;
    }
  }

  FeatureMask baseline_mask;
  baseline_mask.active = in_plan;

  auto train_and_eval = [&](const FeatureMask& mask) {
    Ranker model = algo == Algo::kCoordinateAscent
                       ? Ranker(train_coordinate_ascent(train, &valid, config, mask).model)
                       : Ranker(train_lambdamart(train, &valid, config, mask).model);
    return evaluate(model, valid, config.dcg_cutoff, config.gain).mean_dcg;
  };

  AblationReport report;
  report.algo = algo;
  report.k = config.dcg_cutoff;
  report.gain = config.gain;
  report.baseline_dcg = train_and_eval(baseline_mask);

  for (const auto& group : plan.groups) {
    FeatureMask mask = baseline_mask;
    for (int id : group.ids) mask.active[static_cast<std::size_t>(id - 1)] = false;
    if (mask.count() == 0) {
      report.warnings.push_back("removing group '" + group.name +
                                "' leaves no features; skipped");
      continue;
    }
    AblationRow row;
    row.name = group.name;
    row.mean_dcg = train_and_eval(mask);
    row.delta = row.mean_dcg - report.baseline_dcg;
    report.rows.push_back(std::move(row));
  }
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const AblationRow& a, const AblationRow& b) { return a.delta < b.delta; });
  return report;
}

std::string ablation_report_tsv(const AblationReport& report) {
  std::string out = "# ablation algo=" + algo_name(report.algo) + " dcg@" +
                    std::to_string(report.k) + " gain=" + gain_name(report.gain) + "\n";
  out += "group\tmean_dcg\tdelta\n";
  out += "baseline\t" + format_double(report.baseline_dcg) + "\t0\n";
  for (const auto& row : report.rows) {
    out += row.name + "\t" + format_double(row.mean_dcg) + "\t" + format_double(row.delta) + "\n";
  }
  for (const auto& warning : report.warnings) {
    out += "# warning: " + warning + "\n";
  }
  return out;
}

}  // namespace rankfuse
