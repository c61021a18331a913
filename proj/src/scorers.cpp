// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/scorers.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace rankfuse {

namespace {

std::vector<Token> distinct_sorted(const TokenSeq& seq) {
  std::vector<Token> out(seq.begin(), seq.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::unordered_map<Token, std::uint32_t> occurrence_counts(const TokenSeq& seq) {
  std::unordered_map<Token, std::uint32_t> counts;
  counts.reserve(seq.size());
  for (Token t : seq) ++counts[t];
  return counts;
}

std::uint32_t count_of(const std::unordered_map<Token, std::uint32_t>& counts, Token t) {
  auto it = counts.find(t);
  return it == counts.end() ? 0 : it->second;
}

}  // namespace

double tf(Token term, const TokenSeq& doc) {
  if (doc.empty()) return 0.0;
  const auto n = static_cast<double>(std::count(doc.begin(), doc.end(), term));
  return n / static_cast<double>(doc.size());
}

double idf(Token term, const CollectionStats& stats) {
  if (stats.num_docs == 0) throw DataError("idf undefined on an empty collection");
  const auto df = static_cast<double>(stats.df.get(term));
  return std::log(static_cast<double>(stats.num_docs) / (df + 1.0));
}

TfIdfParts tfidf_parts(const TokenSeq& query, const TokenSeq& doc, const CollectionStats& stats) {
  TfIdfParts parts;
  const auto doc_counts = occurrence_counts(doc);
  const double doc_len = static_cast<double>(doc.size());
  for (Token term : distinct_sorted(query)) {
    const double term_tf =
        doc.empty() ? 0.0 : static_cast<double>(count_of(doc_counts, term)) / doc_len;
    const double term_idf = idf(term, stats);
    parts.tf_sum += term_tf;
    parts.idf_sum += term_idf;
    parts.tf_idf += term_tf * term_idf;
  }
  return parts;
}

double tfidf_score(const TokenSeq& query, const TokenSeq& doc, const CollectionStats& stats) {
  return tfidf_parts(query, doc, stats).tf_idf;
}

double bm25(const TokenSeq& query, const TokenSeq& doc, const CollectionStats& stats,
            const Bm25Params& params) {
  if (stats.avgdl <= 0.0) throw DataError("bm25 undefined on an empty collection");
  const auto doc_counts = occurrence_counts(doc);
  const double len_ratio = static_cast<double>(doc.size()) / stats.avgdl;
  const double norm = params.k1 * (1.0 - params.b + params.b * len_ratio);
  double score = 0.0;
  for (Token term : distinct_sorted(query)) {
    const double c = static_cast<double>(count_of(doc_counts, term));
    if (c == 0.0) continue;
    score += idf(term, stats) * (c * (params.k1 + 1.0)) / (c + norm);
  }
  return score;
}

double qld(const TokenSeq& query, const TokenSeq& doc, const CollectionStats& stats,
           const QldParams& params) {
  if (stats.total_tokens == 0) throw DataError("qld undefined on an empty collection");
  const auto doc_counts = occurrence_counts(doc);
  const double total = static_cast<double>(stats.total_tokens);
  const double len = static_cast<double>(doc.size());
  const double alpha_d = params.mu / (len + params.mu);

  double matched = 0.0;
  double background = 0.0;
  for (Token term : query) {
    const auto cf = static_cast<double>(stats.cf.get(term));
    const double p_c = cf > 0.0 ? cf / total : 1.0 / (2.0 * total);
    background += std::log(p_c);
    const double c = static_cast<double>(count_of(doc_counts, term));
    if (c > 0.0) {
      const double p_s = (c + params.mu * p_c) / (len + params.mu);
      matched += std::log(p_s / (alpha_d * p_c));
    }
  }
  const double n = static_cast<double>(query.size());
  return matched + n * std::log(alpha_d) + background;
}

}  // namespace rankfuse
