// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/dcg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankfuse/parallel.hpp"
#include "rankfuse/types.hpp"

namespace rankfuse {

std::string gain_name(Gain gain) {
  return gain == Gain::kExponential ? "exponential" : "linear";
}

Gain parse_gain(const std::string& name) {
  if (name == "exponential") return Gain::kExponential;
  if (name == "linear") return Gain::kLinear;
  throw DataError("unknown gain function: " + name);
}

double gain_value(int label, Gain gain) {
  if (gain == Gain::kLinear) return static_cast<double>(label);
  return std::exp2(static_cast<double>(label)) - 1.0;
}

double rank_discount(std::size_t position) {
  return 1.0 / std::log2(static_cast<double>(position) + 1.0);
}

double dcg_at_k(std::span<const int> ranked_labels, std::size_t k, Gain gain) {
  const std::size_t n = std::min(k, ranked_labels.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += gain_value(ranked_labels[i], gain) * rank_discount(i + 1);
  }
  return sum;
}

double ideal_dcg_at_k(std::span<const int> labels, std::size_t k, Gain gain) {
  std::vector<int> sorted(labels.begin(), labels.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<int>());
  return dcg_at_k(sorted, k, gain);
}

namespace {

// DCG of one group under the score-descending / tie-key-ascending ranking.
double group_dcg(const GroupedLabels& groups, std::span<const double> scores, std::size_t g,
                 std::size_t k, Gain gain, std::vector<std::size_t>& order) {
  const std::size_t lo = groups.bounds[g];
  const std::size_t hi = groups.bounds[g + 1];
  const std::size_t n = hi - lo;
  order.resize(n);
  std::iota(order.begin(), order.end(), lo);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const std::size_t top = std::min(k, n);
  double sum = 0.0;
  for (std::size_t i = 0; i < top; ++i) {
    sum += gain_value(groups.labels[order[i]], gain) * rank_discount(i + 1);
  }
  return sum;
}

}  // namespace

double mean_dcg_grouped(const GroupedLabels& groups, std::span<const double> scores,
                        std::size_t k, Gain gain, std::vector<double>* per_group) {
  const std::size_t g_count = groups.num_groups();
  if (g_count == 0) return 0.0;
  std::vector<double> slots(g_count, 0.0);
#pragma omp parallel num_threads(parallel::max_threads())
  {
    std::vector<std::size_t> order;
#pragma omp for schedule(static)
    for (std::int64_t g = 0; g < static_cast<std::int64_t>(g_count); ++g) {
      slots[static_cast<std::size_t>(g)] =
          group_dcg(groups, scores, static_cast<std::size_t>(g), k, gain, order);
    }
  }
  double sum = 0.0;
  for (double v : slots) sum += v;
  if (per_group) *per_group = std::move(slots);
  return sum / static_cast<double>(g_count);
}

double mean_dcg_grouped_serial(const GroupedLabels& groups, std::span<const double> scores,
                               std::size_t k, Gain gain, std::vector<double>* per_group) {
  const std::size_t g_count = groups.num_groups();
  if (g_count == 0) return 0.0;
  std::vector<double> slots(g_count, 0.0);
  std::vector<std::size_t> order;
  for (std::size_t g = 0; g < g_count; ++g) {
    slots[g] = group_dcg(groups, scores, g, k, gain, order);
  }
  double sum = 0.0;
  for (double v : slots) sum += v;
  if (per_group) *per_group = std::move(slots);
  return sum / static_cast<double>(g_count);
}

}  // namespace rankfuse
