// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_GRID_SEARCH_HPP_
#define RANKFUSE_GRID_SEARCH_HPP_

#include <vector>

#include "rankfuse/corpus.hpp"
#include "rankfuse/dcg.hpp"
#include "rankfuse/scorers.hpp"
#include "rankfuse/stats.hpp"

namespace rankfuse {

struct GridCell {
  double k1 = 0.0;
  double b = 0.0;
  double mean_dcg = 0.0;
};

struct GridSearchResult {
  Bm25Params best;
  std::vector<GridCell> cells;  // k1-major, grid order
  // All labels equal, so every cell ties and the (smaller k1, smaller b)
  // rule alone picked the winner.
  bool degenerate = false;
};

// Exhaustive sweep: each (k1, b) cell ranks every qid group of the dataset by
// its BM25 score over the stats field and takes the mean DCG@k. The best cell
// wins by mean DCG, ties by smaller k1 then smaller b. Cells are independent,
// so they are evaluated concurrently into fixed slots; the scan for the best
// is serial and deterministic.
GridSearchResult grid_search_bm25_full(const Dataset& train, const CollectionStats& stats,
                                       const std::vector<double>& k1_grid,
                                       const std::vector<double>& b_grid,
                                       std::size_t k = kDefaultDcgCutoff,
                                       Gain gain = Gain::kExponential);

Bm25Params grid_search_bm25(const Dataset& train, const CollectionStats& stats,
                            const std::vector<double>& k1_grid, const std::vector<double>& b_grid,
                            std::size_t k = kDefaultDcgCutoff, Gain gain = Gain::kExponential);

}  // namespace rankfuse

#endif  // RANKFUSE_GRID_SEARCH_HPP_
