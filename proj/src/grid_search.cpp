// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/grid_search.hpp"

#include <algorithm>

#include "rankfuse/parallel.hpp"

namespace rankfuse {

GridSearchResult grid_search_bm25_full(const Dataset& train, const CollectionStats& stats,
                                       const std::vector<double>& k1_grid,
                                       const std::vector<double>& b_grid, std::size_t k,
                                       Gain gain) {
  if (k1_grid.empty() || b_grid.empty()) throw DataError("grid search: empty grid");
  if (train.examples.empty()) throw DataError("grid search: empty dataset");

  // Fixed row layout shared by every cell: groups ascending by qid, rows
  // inside a group ascending by doc_id (the ranking tie key).
  std::vector<std::size_t> rows;
  GroupedLabels labels;
  labels.bounds.push_back(0);
  bool any_pair = false;
  for (const QidGroup& group : group_by_qid(train)) {
    std::vector<std::size_t> members = group.indices;
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return train.examples[a].document.doc_id < train.examples[b].document.doc_id;
    });
    for (std::size_t idx : members) {
      rows.push_back(idx);
      labels.labels.push_back(train.examples[idx].label);
      if (train.examples[idx].label != train.examples[members.front()].label) any_pair = true;
    }
    labels.bounds.push_back(rows.size());
  }

  std::vector<TokenSeq> docs;
  docs.reserve(rows.size());
  for (std::size_t idx : rows) docs.push_back(field_tokens(train.examples[idx].document, stats.field));

  GridSearchResult result;
  result.degenerate = !any_pair;
  result.cells.resize(k1_grid.size() * b_grid.size());
  const auto cell_count = static_cast<std::int64_t>(result.cells.size());

#ifdef _OPENMP
#pragma omp parallel num_threads(parallel::max_threads())
#endif
  {
    std::vector<double> scores(rows.size());
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (std::int64_t c = 0; c < cell_count; ++c) {
      const std::size_t ci = static_cast<std::size_t>(c);
      const Bm25Params params{k1_grid[ci / b_grid.size()], b_grid[ci % b_grid.size()]};
      for (std::size_t r = 0; r < rows.size(); ++r) {
        scores[r] = bm25(train.examples[rows[r]].query.tokens, docs[r], stats, params);
      }
      result.cells[ci] = {params.k1, params.b,
                          mean_dcg_grouped_serial(labels, scores, k, gain)};
    }
  }

  const GridCell* best = &result.cells.front();
  for (const GridCell& cell : result.cells) {
    if (cell.mean_dcg > best->mean_dcg ||
        (cell.mean_dcg == best->mean_dcg &&
         (cell.k1 < best->k1 || (cell.k1 == best->k1 && cell.b < best->b)))) {
      best = &cell;
    }
  }
  result.best = {best->k1, best->b};
  return result;
}

Bm25Params grid_search_bm25(const Dataset& train, const CollectionStats& stats,
                            const std::vector<double>& k1_grid, const std::vector<double>& b_grid,
                            std::size_t k, Gain gain) {
  return grid_search_bm25_full(train, stats, k1_grid, b_grid, k, gain).best;
}

}  // namespace rankfuse
