// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_DCG_HPP_
#define RANKFUSE_DCG_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rankfuse {

/// Gain applied to a relevance grade before position discounting.
enum class Gain {
  kExponential,  // 2^rel - 1
  kLinear,       // rel
};

std::string gain_name(Gain gain);
Gain parse_gain(const std::string& name);  // throws DataError on unknown name

double gain_value(int label, Gain gain);

/// Rank discount 1/log2(position + 1); position is 1-based.
double rank_discount(std::size_t position);

inline constexpr std::size_t kDefaultDcgCutoff = 10;

/// DCG@k of labels listed in rank order (best rank first).
double dcg_at_k(std::span<const int> ranked_labels, std::size_t k = kDefaultDcgCutoff,
                Gain gain = Gain::kExponential);

/// DCG@k of the labels sorted descending; the per-query upper bound.
double ideal_dcg_at_k(std::span<const int> labels, std::size_t k = kDefaultDcgCutoff,
                      Gain gain = Gain::kExponential);

/// Grouped labels laid out LightGBM-style: bounds holds G+1 offsets into labels.
/// Rows inside a group must already be ordered by the ranking tie key
/// (ascending doc_id); scoring sorts stably by score descending on top of that.
struct GroupedLabels {
  std::vector<int> labels;
  std::vector<std::size_t> bounds;  // size G+1, bounds[0] == 0

  std::size_t num_groups() const { return bounds.empty() ? 0 : bounds.size() - 1; }
};

// Mean DCG@k over groups given one score per row. Per-group values land in
// slots of an indexed buffer and are summed in group order, so the result is
// bit-identical for any worker count.
double mean_dcg_grouped(const GroupedLabels& groups, std::span<const double> scores,
                        std::size_t k, Gain gain, std::vector<double>* per_group = nullptr);

/// Plain single-threaded reference for the kernel above; kept for testing.
double mean_dcg_grouped_serial(const GroupedLabels& groups, std::span<const double> scores,
                               std::size_t k, Gain gain, std::vector<double>* per_group = nullptr);

}  // namespace rankfuse

#endif  // RANKFUSE_DCG_HPP_
