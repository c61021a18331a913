// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "rankfuse/grid_search.hpp"
#include "rankfuse/synth.hpp"
#include "test_util.hpp"

using namespace rankfuse;

namespace {

// Brute-force sweep: rank every qid group by freshly computed BM25 over the
// title plus content tokens and average the DCG, mirroring nothing of the
// library's grid code beyond the documented layout.
std::vector<double> oracle_cells(const Dataset& dataset, const std::vector<double>& k1_grid,
                                 const std::vector<double>& b_grid, std::size_t k) {
  oracle::Collection collection;
  std::map<std::string, bool> seen;
  for (const LabeledExample& ex : dataset.examples) {
    if (!seen.emplace(ex.document.doc_id, true).second) continue;
    TokenSeq both = ex.document.title;
    both.insert(both.end(), ex.document.content.begin(), ex.document.content.end());
    collection.docs.push_back(std::move(both));
  }

  std::map<std::int64_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
    groups[dataset.examples[i].query.qid].push_back(i);
  }
  for (auto& [qid, members] : groups) {
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return dataset.examples[a].document.doc_id < dataset.examples[b].document.doc_id;
    });
  }

  std::vector<double> cells;
  for (double k1 : k1_grid) {
    for (double b : b_grid) {
      double sum = 0.0;
      for (const auto& [qid, members] : groups) {
        std::vector<double> scores;
        std::vector<int> labels;
        for (std::size_t idx : members) {
          const LabeledExample& ex = dataset.examples[idx];
          TokenSeq both = ex.document.title;
          both.insert(both.end(), ex.document.content.begin(), ex.document.content.end());
          scores.push_back(oracle::bm25(ex.query.tokens, both, collection, k1, b));
          labels.push_back(ex.label);
        }
        std::vector<std::size_t> order(scores.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b2) { return scores[a] > scores[b2]; });
        std::vector<int> ranked;
        for (std::size_t i : order) ranked.push_back(labels[i]);
        sum += oracle::dcg(ranked, k, true);
      }
      cells.push_back(sum / static_cast<double>(groups.size()));
    }
  }
  return cells;
}

std::size_t oracle_argmax(const std::vector<double>& cells, const std::vector<double>& k1_grid,
                          const std::vector<double>& b_grid) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const double k1 = k1_grid[i / b_grid.size()];
    const double b = b_grid[i % b_grid.size()];
    const double bk1 = k1_grid[best / b_grid.size()];
    const double bb = b_grid[best % b_grid.size()];
    if (cells[i] > cells[best] ||
        (cells[i] == cells[best] && (k1 < bk1 || (k1 == bk1 && b < bb)))) {
      best = i;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("a singleton grid returns its only cell") {
  const Dataset dataset = synth_length_decisive_corpus();
  const CollectionStats stats = build_stats(dataset, Field::kTitleContent);
  const GridSearchResult result = grid_search_bm25_full(dataset, stats, {1.6}, {0.87});
  REQUIRE(result.cells.size() == 1);
  CHECK(result.best.k1 == 1.6);
  CHECK(result.best.b == 0.87);
  CHECK_FALSE(result.degenerate);
}

TEST_CASE("the length-decisive corpus drives b to the top of the grid") {
  const Dataset dataset = synth_length_decisive_corpus();
  const CollectionStats stats = build_stats(dataset, Field::kTitleContent);
  const std::vector<double> k1_grid = {0.6, 1.2, 1.6, 2.0};
  const std::vector<double> b_grid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const GridSearchResult result = grid_search_bm25_full(dataset, stats, k1_grid, b_grid);

  CHECK(result.best.b == 1.0);
  // k1 cancels from every within-group comparison, so the b=1 column ties
  // across k1 and the smaller-k1 rule picks the first.
  CHECK(result.best.k1 == 0.6);
  CHECK_FALSE(result.degenerate);
  REQUIRE(result.cells.size() == k1_grid.size() * b_grid.size());

  for (std::size_t row = 0; row < k1_grid.size(); ++row) {
    for (std::size_t col = 1; col < b_grid.size(); ++col) {
      const double prev = result.cells[row * b_grid.size() + col - 1].mean_dcg;
      const double curr = result.cells[row * b_grid.size() + col].mean_dcg;
      CHECK(curr > prev);
    }
  }
}

TEST_CASE("cells are laid out k1-major in grid order") {
  const Dataset dataset = synth_length_decisive_corpus();
  const CollectionStats stats = build_stats(dataset, Field::kTitleContent);
  const std::vector<double> k1_grid = {2.0, 0.5};
  const std::vector<double> b_grid = {0.9, 0.1, 0.5};
  const GridSearchResult result = grid_search_bm25_full(dataset, stats, k1_grid, b_grid);
  REQUIRE(result.cells.size() == 6);
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    CHECK(result.cells[i].k1 == k1_grid[i / b_grid.size()]);
    CHECK(result.cells[i].b == b_grid[i % b_grid.size()]);
  }
}

TEST_CASE("grid search matches a brute-force sweep on random corpora") {
  const std::vector<double> k1_grid = {0.5, 1.0, 1.6};
  const std::vector<double> b_grid = {0.0, 0.5, 0.87, 1.0};
  std::size_t usable = 0;
  for (std::uint64_t seed = 500; seed < 515; ++seed) {
    const Dataset dataset = test::make_random_dataset(seed);
    if (dataset.examples.empty()) continue;
    const CollectionStats stats = build_stats(dataset, Field::kTitleContent);
    if (stats.avgdl == 0.0) continue;
    ++usable;

    const GridSearchResult result = grid_search_bm25_full(dataset, stats, k1_grid, b_grid);
    const std::vector<double> expected = oracle_cells(dataset, k1_grid, b_grid, 10);
    REQUIRE(result.cells.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(std::abs(result.cells[i].mean_dcg - expected[i]) <= 1e-9);
    }
    const std::size_t best = oracle_argmax(expected, k1_grid, b_grid);
    CHECK(result.best.k1 == k1_grid[best / b_grid.size()]);
    CHECK(result.best.b == b_grid[best % b_grid.size()]);

    const Bm25Params direct = grid_search_bm25(dataset, stats, k1_grid, b_grid);
    CHECK(direct.k1 == result.best.k1);
    CHECK(direct.b == result.best.b);
  }
  REQUIRE(usable >= 10);
}

TEST_CASE("a corpus without distinct labels is flagged degenerate") {
  Dataset dataset = synth_length_decisive_corpus();
  for (LabeledExample& ex : dataset.examples) ex.label = 2;
  const CollectionStats stats = build_stats(dataset, Field::kTitleContent);
  // Unsorted grids: the tie rule, not grid order, must pick the winner.
  const GridSearchResult result =
      grid_search_bm25_full(dataset, stats, {1.0, 0.5}, {0.9, 0.1});
  CHECK(result.degenerate);
  CHECK(result.best.k1 == 0.5);
  CHECK(result.best.b == 0.1);
  const double first = result.cells.front().mean_dcg;
  for (const GridCell& cell : result.cells) CHECK(cell.mean_dcg == first);
}

TEST_CASE("grid search rejects empty inputs") {
  const Dataset dataset = synth_length_decisive_corpus();
  const CollectionStats stats = build_stats(dataset, Field::kTitleContent);
  CHECK_THROWS_AS(grid_search_bm25_full(dataset, stats, {}, {0.5}), DataError);
  CHECK_THROWS_AS(grid_search_bm25_full(dataset, stats, {1.0}, {}), DataError);
  Dataset empty;
  CHECK_THROWS_AS(grid_search_bm25_full(empty, stats, {1.0}, {0.5}), DataError);
}
