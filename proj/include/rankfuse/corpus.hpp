// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_CORPUS_HPP_
#define RANKFUSE_CORPUS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "rankfuse/types.hpp"

namespace rankfuse {

// Annotation TSV: one example per line, 6 tab-separated columns
//   qid \t query-tokens \t title-tokens \t content-tokens \t label \t monthly_freq
// Token columns are space-separated non-negative integers; an empty column is
// an empty sequence; monthly_freq of "-" means absent.
Dataset parse_dataset(const std::string& path);
Dataset parse_dataset_text(const std::string& text);  // same grammar, in-memory
void write_dataset(const Dataset& dataset, const std::string& path);

// Session TSV: qid \t query-tokens \t doc_id \t clicked(0/1), one result per
// line; consecutive lines with the same qid form one session record.
std::vector<SessionRecord> parse_sessions(const std::string& path);
std::vector<SessionRecord> parse_sessions_text(const std::string& text);

/// Reassigns qids so identical query token sequences share one id and distinct
/// sequences never collide. New ids are consecutive from 0 in first-appearance
/// order; everything else is untouched.
Dataset remap_qids(const Dataset& dataset);

/// Field mask for stopword counting.
struct StopwordFields {
  bool query = true;
  bool title = true;
  bool content = true;
};

/// Top-k corpus tokens by occurrence count; ties at the cutoff go to the
/// smaller token id. Fewer than k distinct tokens returns all of them.
StopwordSet extract_stopwords(const Dataset& dataset, std::size_t k = 50,
                              StopwordFields fields = {});

// Stopword persistence: versioned header, the requested k, one token per
// line in ascending order, end marker.
void save_stopwords(const StopwordSet& stopwords, const std::string& path);
StopwordSet load_stopwords(const std::string& path);

// Query file: one query per line as space-separated token ids; qids are
// 0-based line numbers.
std::vector<Query> parse_query_file(const std::string& path);

/// Cosine similarity of the token-count vectors; 0 if either side is empty,
/// exactly 1 for equal count vectors. Symmetric, always in [0, 1].
double query_similarity(const TokenSeq& a, const TokenSeq& b);

/// Keeps candidates whose best similarity against any reference reaches the
/// threshold; input order preserved. An empty reference keeps nothing unless
/// the threshold is 0.
std::vector<Query> filter_by_similarity(const std::vector<Query>& candidates,
                                        const std::vector<Query>& reference,
                                        double threshold = 0.9);

/// Drops session records with no clicked result; order preserved.
std::vector<SessionRecord> filter_clickless(const std::vector<SessionRecord>& sessions);

struct SplitResult {
  Dataset train;
  Dataset valid;
  // True when test_queries was empty and the deterministic last-by-qid
  // fallback was used instead of similarity ranking.
  bool fallback_used = false;
};

/// Sends the ceil(fraction * Q) qids most similar to any test query to the
/// validation side (ties to the smaller qid), everything else to train.
SplitResult split_by_similarity(const Dataset& dataset, const std::vector<Query>& test_queries,
                                double fraction = 0.2);

/// Ranking groups: one per distinct qid, ascending by qid; each group lists
/// example indices in dataset order.
struct QidGroup {
  std::int64_t qid = 0;
  std::vector<std::size_t> indices;
};
std::vector<QidGroup> group_by_qid(const Dataset& dataset);

}  // namespace rankfuse

#endif  // RANKFUSE_CORPUS_HPP_
