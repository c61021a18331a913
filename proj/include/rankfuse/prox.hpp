// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_PROX_HPP_
#define RANKFUSE_PROX_HPP_

#include "rankfuse/types.hpp"

namespace rankfuse {

enum class StopMode { kRemoveStopwords, kKeepStopwords };

/// Remove mode deletes stopword tokens preserving order (positions re-index);
/// keep mode returns the input unchanged.
TokenSeq apply_stop_mode(const TokenSeq& seq, StopMode mode, const StopwordSet& stopwords);

// All proximity scores work over the query's distinct terms with 0-based
// positions in the (already stop-mode-processed) document. A term or pair
// with no occurrence contributes the document length as penalty.
struct ProxVector {
  double avg_pair_distance = 0.0;   // PROX-1: mean over term pairs of min occurrence distance
  double mean_first_position = 0.0; // PROX-2: mean first-occurrence position
  int pairs_within_5 = 0;           // PROX-3
  int pairs_within_10 = 0;          // PROX-4
};

/// Minimum pairwise occurrence distance averaged over unordered distinct-term
/// pairs; queries with fewer than two distinct terms score 0.
double prox_avg_pair_distance(const TokenSeq& query, const TokenSeq& doc);

/// Mean 0-based first-occurrence position over distinct query terms; an empty
/// query scores 0.
double prox_mean_first_position(const TokenSeq& query, const TokenSeq& doc);

/// Number of unordered distinct-term pairs with some occurrence pair at
/// absolute distance <= window; each pair counts at most once.
int prox_pairs_within(const TokenSeq& query, const TokenSeq& doc, int window);

/// All four proximity scores in one document scan.
ProxVector prox_vector(const TokenSeq& query, const TokenSeq& doc);

struct ProxFeatures {
  ProxVector stop_removed;  // features 13-16
  ProxVector stop_kept;     // features 17-20
};

/// Removed variant applies the stopword filter to both query and document
/// before scoring; kept variant scores the inputs as given.
ProxFeatures prox_features(const TokenSeq& query, const TokenSeq& doc_title_content,
                           const StopwordSet& stopwords);

}  // namespace rankfuse

#endif  // RANKFUSE_PROX_HPP_
