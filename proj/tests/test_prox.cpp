// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "rankfuse/prox.hpp"
#include "test_util.hpp"

using namespace rankfuse;

namespace {

StopwordSet make_stopwords(std::initializer_list<Token> tokens) {
  StopwordSet s;
  s.tokens.assign(tokens);
  s.k = s.tokens.size();
  return s;
}

std::size_t distinct_count(const TokenSeq& q) { return std::set<Token>(q.begin(), q.end()).size(); }

}  // namespace

TEST_CASE("apply_stop_mode") {
  const StopwordSet stop = make_stopwords({9});
  CHECK(apply_stop_mode({1, 9, 2}, StopMode::kRemoveStopwords, stop) == TokenSeq{1, 2});
  CHECK(apply_stop_mode({1, 9, 2}, StopMode::kKeepStopwords, stop) == TokenSeq{1, 9, 2});
  CHECK(apply_stop_mode({9, 9}, StopMode::kRemoveStopwords, stop).empty());
}

TEST_CASE("prox averaged pair distance worked values") {
  CHECK(prox_avg_pair_distance({1, 2}, {1, 3, 3, 2}) == 3.0);
  CHECK(prox_avg_pair_distance({1}, {1, 3, 3, 2}) == 0.0);
  CHECK(prox_avg_pair_distance({}, {1, 2}) == 0.0);
  // Both terms absent: the pair pays the document length.
  CHECK(prox_avg_pair_distance({1, 2}, {5, 5}) == 2.0);
  // One term absent pays the same penalty.
  CHECK(prox_avg_pair_distance({1, 2}, {1, 5, 5}) == 3.0);
  // Duplicate query tokens change nothing.
  CHECK(prox_avg_pair_distance({1, 2, 1}, {1, 3, 3, 2}) == 3.0);
}

TEST_CASE("prox mean first position worked values") {
  CHECK(prox_mean_first_position({7}, {3, 7, 7}) == 1.0);
  CHECK(prox_mean_first_position({7, 3}, {3, 7, 7}) == 0.5);
  CHECK(prox_mean_first_position({9}, {3, 7}) == 2.0);
  CHECK(prox_mean_first_position({}, {3, 7}) == 0.0);
  CHECK(prox_mean_first_position({9}, {}) == 0.0);
}

TEST_CASE("prox window counts include the boundary") {
  const TokenSeq doc = {1, 0, 0, 0, 0, 2};  // occurrence distance exactly 5
  CHECK(prox_pairs_within({1, 2}, doc, 5) == 1);
  CHECK(prox_pairs_within({1, 2}, doc, 4) == 0);
  CHECK(prox_pairs_within({1, 2, 3}, {1, 2, 3}, 5) == 3);
  CHECK(prox_pairs_within({1, 2}, {5, 5}, 10) == 0);
}

TEST_CASE("prox_vector bundles the four scores") {
  const ProxVector v = prox_vector({1, 2}, {1, 3, 3, 2});
  CHECK(v.avg_pair_distance == 3.0);
  CHECK(v.mean_first_position == 1.5);
  CHECK(v.pairs_within_5 == 1);
  CHECK(v.pairs_within_10 == 1);
}

TEST_CASE("prox_features: empty stopword set makes both variants equal") {
  const StopwordSet none = make_stopwords({});
  const ProxFeatures f = prox_features({1, 2}, {1, 3, 3, 2}, none);
  CHECK(f.stop_removed.avg_pair_distance == f.stop_kept.avg_pair_distance);
  CHECK(f.stop_removed.mean_first_position == f.stop_kept.mean_first_position);
  CHECK(f.stop_removed.pairs_within_5 == f.stop_kept.pairs_within_5);
  CHECK(f.stop_removed.pairs_within_10 == f.stop_kept.pairs_within_10);
}

TEST_CASE("prox_features: an all-stopword query zeroes the removed variant") {
  const StopwordSet stop = make_stopwords({1, 2});
  const ProxFeatures f = prox_features({1, 2}, {1, 3, 2}, stop);
  CHECK(f.stop_removed.avg_pair_distance == 0.0);
  CHECK(f.stop_removed.mean_first_position == 0.0);
  CHECK(f.stop_removed.pairs_within_5 == 0);
  CHECK(f.stop_removed.pairs_within_10 == 0);
  CHECK(f.stop_kept.avg_pair_distance == 2.0);
}

TEST_CASE("prox removal re-indexes document positions") {
  // After dropping stopword 9 the doc reads [1, 2]: distance 1, first 0/1.
  const StopwordSet stop = make_stopwords({9});
  const ProxFeatures f = prox_features({1, 2}, {1, 9, 9, 9, 9, 9, 9, 2}, stop);
  CHECK(f.stop_removed.avg_pair_distance == 1.0);
  CHECK(f.stop_removed.mean_first_position == 0.5);
  CHECK(f.stop_removed.pairs_within_5 == 1);
  CHECK(f.stop_kept.avg_pair_distance == 7.0);
  CHECK(f.stop_kept.pairs_within_5 == 0);
  CHECK(f.stop_kept.pairs_within_10 == 1);
}

TEST_CASE("prox matches the pair-enumeration oracle exactly on 1000 instances") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    std::mt19937_64 rng(mix_seed(seed, 0xa71));
    const TokenSeq query = test::random_seq(rng, 0, 5, 9);
    const TokenSeq doc = test::random_seq(rng, 0, 50, 9);
    std::set<Token> stop;
    for (int i = 0; i < 3; ++i) {
      if (uniform01(rng) < 0.5) stop.insert(static_cast<Token>(uniform_below(rng, 9)));
    }
    StopwordSet stopwords;
    stopwords.tokens.assign(stop.begin(), stop.end());
    stopwords.k = stopwords.tokens.size();

    const ProxFeatures got = prox_features(query, doc, stopwords);
    const TokenSeq q_rm = oracle::remove_stopwords(query, stop);
    const TokenSeq d_rm = oracle::remove_stopwords(doc, stop);

    CHECK(got.stop_removed.avg_pair_distance == oracle::prox1(q_rm, d_rm));
    CHECK(got.stop_removed.mean_first_position == oracle::prox2(q_rm, d_rm));
    CHECK(got.stop_removed.pairs_within_5 == oracle::prox_window(q_rm, d_rm, 5));
    CHECK(got.stop_removed.pairs_within_10 == oracle::prox_window(q_rm, d_rm, 10));
    CHECK(got.stop_kept.avg_pair_distance == oracle::prox1(query, doc));
    CHECK(got.stop_kept.mean_first_position == oracle::prox2(query, doc));
    CHECK(got.stop_kept.pairs_within_5 == oracle::prox_window(query, doc, 5));
    CHECK(got.stop_kept.pairs_within_10 == oracle::prox_window(query, doc, 10));

    // Window-5 pairs are a subset of window-10 pairs, bounded by C(m, 2).
    const std::size_t m = distinct_count(query);
    const std::size_t pair_bound = m < 2 ? 0 : m * (m - 1) / 2;
    CHECK(got.stop_kept.pairs_within_5 <= got.stop_kept.pairs_within_10);
    CHECK(static_cast<std::size_t>(got.stop_kept.pairs_within_10) <= pair_bound);
  }
}

TEST_CASE("prox values are invariant under duplicated query tokens") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const TokenSeq query = test::random_seq(rng, 1, 4, 8);
    TokenSeq doubled = query;
    doubled.insert(doubled.end(), query.begin(), query.end());
    const TokenSeq doc = test::random_seq(rng, 0, 30, 8);
    CHECK(prox_avg_pair_distance(query, doc) == prox_avg_pair_distance(doubled, doc));
    CHECK(prox_mean_first_position(query, doc) == prox_mean_first_position(doubled, doc));
    CHECK(prox_pairs_within(query, doc, 5) == prox_pairs_within(doubled, doc, 5));
    CHECK(prox_pairs_within(query, doc, 10) == prox_pairs_within(doubled, doc, 10));
  }
}

TEST_CASE("appending document tokens never shrinks window counts") {
  std::mt19937_64 rng(123);
  for (int i = 0; i < 200; ++i) {
    const TokenSeq query = test::random_seq(rng, 2, 5, 8);
    TokenSeq doc = test::random_seq(rng, 0, 20, 8);
    const int before5 = prox_pairs_within(query, doc, 5);
    const int before10 = prox_pairs_within(query, doc, 10);
    const double first_before = prox_mean_first_position(query, doc);
    const TokenSeq extra = test::random_seq(rng, 1, 10, 8);
    doc.insert(doc.end(), extra.begin(), extra.end());
    CHECK(prox_pairs_within(query, doc, 5) >= before5);
    CHECK(prox_pairs_within(query, doc, 10) >= before10);
    // First occurrences of already-present terms are untouched; absent terms
    // may pay a larger length penalty, so the mean can only move through
    // terms that were missing before.
    bool all_present = true;
    for (Token t : oracle::distinct_terms(query)) {
      if (oracle::occurrences(t, TokenSeq(doc.begin(), doc.end() - static_cast<std::ptrdiff_t>(
                                                            extra.size()))) == 0) {
        all_present = false;
      }
    }
    if (all_present) CHECK(prox_mean_first_position(query, doc) == first_before);
  }
}
