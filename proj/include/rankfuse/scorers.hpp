// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_SCORERS_HPP_
#define RANKFUSE_SCORERS_HPP_

#include "rankfuse/stats.hpp"
#include "rankfuse/types.hpp"

namespace rankfuse {

struct Bm25Params {
  double k1 = 1.6;
  double b = 0.87;
};

struct QldParams {
  double mu = 2000.0;  // Dirichlet pseudo-count
};

/// Length-normalized term frequency: occurrences / doc length, 0 for an empty doc.
double tf(Token term, const TokenSeq& doc);

/// ln(|D| / (df + 1)); unseen terms use df = 0. Negative values (df == |D|)
/// are allowed. Throws DataError on an empty collection.
double idf(Token term, const CollectionStats& stats);

/// TF/IDF sums over the query's distinct terms, accumulated in ascending
/// token order. tf_idf backs feature 10, tf_sum 11, idf_sum 12.
struct TfIdfParts {
  double tf_sum = 0.0;
  double idf_sum = 0.0;
  double tf_idf = 0.0;
};
TfIdfParts tfidf_parts(const TokenSeq& query, const TokenSeq& doc, const CollectionStats& stats);
double tfidf_score(const TokenSeq& query, const TokenSeq& doc, const CollectionStats& stats);

// Okapi scoring over distinct query terms. The per-term frequency is the raw
// occurrence count, not the normalized tf above. Throws DataError when
// avgdl == 0 (empty collection).
double bm25(const TokenSeq& query, const TokenSeq& doc, const CollectionStats& stats,
            const Bm25Params& params = {});

// Dirichlet-smoothed query log-likelihood:
//   sum_{i: c(q_i;d)>0} log(p_s(q_i|d) / (a_d p(q_i|C))) + n log a_d + sum_i log p(q_i|C)
// with p_s = (c + mu p(q_i|C)) / (len + mu) and a_d = mu / (len + mu).
// Terms are visited in query order. Unseen-term collection probability is
// floored at 1/(2 total_tokens). Throws DataError when total_tokens == 0.
double qld(const TokenSeq& query, const TokenSeq& doc, const CollectionStats& stats,
           const QldParams& params = {});

}  // namespace rankfuse

#endif  // RANKFUSE_SCORERS_HPP_
