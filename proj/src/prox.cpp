// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/prox.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <unordered_map>
#include <vector>

namespace rankfuse {

TokenSeq apply_stop_mode(const TokenSeq& seq, StopMode mode, const StopwordSet& stopwords) {
  if (mode == StopMode::kKeepStopwords) return seq;
  TokenSeq out;
  out.reserve(seq.size());
  for (Token t : seq) {
    if (!stopwords.contains(t)) out.push_back(t);
  }
  return out;
}

namespace {

std::vector<Token> distinct_sorted(const TokenSeq& seq) {
  std::vector<Token> out(seq.begin(), seq.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Ascending occurrence positions of each query term in the document.
std::vector<std::vector<std::int64_t>> term_positions(const std::vector<Token>& terms,
                                                      const TokenSeq& doc) {
  std::unordered_map<Token, std::size_t> slot;
  slot.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) slot.emplace(terms[i], i);
  std::vector<std::vector<std::int64_t>> positions(terms.size());
  for (std::size_t p = 0; p < doc.size(); ++p) {
    auto it = slot.find(doc[p]);
    if (it != slot.end()) positions[it->second].push_back(static_cast<std::int64_t>(p));
  }
  return positions;
}

// Minimum |a - b| over two ascending position lists (merge scan).
std::int64_t min_gap(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    best = std::min(best, std::abs(a[i] - b[j]));
    if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return best;
}

}  // namespace

ProxVector prox_vector(const TokenSeq& query, const TokenSeq& doc) {
  ProxVector out;
  const auto terms = distinct_sorted(query);
  const std::size_t m = terms.size();
  const auto doc_len = static_cast<std::int64_t>(doc.size());
  if (m == 0) return out;

  const auto positions = term_positions(terms, doc);

  // PROX-2: mean first position; missing terms pay the document length.
  std::int64_t first_sum = 0;
  for (const auto& pos : positions) {
    first_sum += pos.empty() ? doc_len : pos.front();
  }
  out.mean_first_position = static_cast<double>(first_sum) / static_cast<double>(m);

  if (m < 2) return out;

  std::int64_t pair_sum = 0;
  std::int64_t pair_count = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      ++pair_count;
      if (positions[i].empty() || positions[j].empty()) {
        pair_sum += doc_len;
        continue;
      }
      const std::int64_t gap = min_gap(positions[i], positions[j]);
      pair_sum += gap;
      if (gap <= 5) ++out.pairs_within_5;
      if (gap <= 10) ++out.pairs_within_10;
    }
  }
  out.avg_pair_distance = static_cast<double>(pair_sum) / static_cast<double>(pair_count);
  return out;
}

double prox_avg_pair_distance(const TokenSeq& query, const TokenSeq& doc) {
  return prox_vector(query, doc).avg_pair_distance;
}

double prox_mean_first_position(const TokenSeq& query, const TokenSeq& doc) {
  return prox_vector(query, doc).mean_first_position;
}

int prox_pairs_within(const TokenSeq& query, const TokenSeq& doc, int window) {
  const auto terms = distinct_sorted(query);
  const auto positions = term_positions(terms, doc);
  int pairs = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (positions[i].empty() || positions[j].empty()) continue;
      if (min_gap(positions[i], positions[j]) <= window) ++pairs;
    }
  }
  return pairs;
}

ProxFeatures prox_features(const TokenSeq& query, const TokenSeq& doc_title_content,
                           const StopwordSet& stopwords) {
  ProxFeatures out;
  const TokenSeq q_removed = apply_stop_mode(query, StopMode::kRemoveStopwords, stopwords);
  const TokenSeq d_removed = apply_stop_mode(doc_title_content, StopMode::kRemoveStopwords, stopwords);
  out.stop_removed = prox_vector(q_removed, d_removed);
  out.stop_kept = prox_vector(query, doc_title_content);
  return out;
}

}  // namespace rankfuse
