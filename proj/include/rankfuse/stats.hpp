// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_STATS_HPP_
#define RANKFUSE_STATS_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rankfuse/types.hpp"

namespace rankfuse {

enum class Field { kTitle, kContent, kTitleContent };

std::string field_name(Field field);
Field parse_field(const std::string& name);  // throws DataError on unknown name

/// Tokens of one document field; title_content is title followed by content.
TokenSeq field_tokens(const Document& doc, Field field);

/// Token -> count map backed by a dense array when the vocabulary is
/// contiguous and small, a hash map otherwise. Lookups behave identically.
class TokenStatMap {
 public:
  std::uint64_t get(Token t) const {
    if (dense_) {
      return t < dense_counts_.size() ? dense_counts_[t] : 0;
    }
    auto it = sparse_counts_.find(t);
    return it == sparse_counts_.end() ? 0 : it->second;
  }

  void add(Token t, std::uint64_t n);
  void merge(const TokenStatMap& other);

  /// Picks the final representation; call once after all add()/merge() calls.
  void finalize();

  std::size_t distinct() const;
  bool is_dense() const { return dense_; }

  /// Visits (token, count) pairs in ascending token order.
  void for_each_sorted(const std::function<void(Token, std::uint64_t)>& fn) const;

 private:
  bool dense_ = false;
  std::vector<std::uint64_t> dense_counts_;
  std::unordered_map<Token, std::uint64_t> sparse_counts_;
};

/// Per-field corpus statistics behind IDF, BM25 and the smoothed language
/// model: document frequencies, collection term counts, average length.
struct CollectionStats {
  Field field = Field::kTitleContent;
  std::uint64_t num_docs = 0;
  std::uint64_t total_tokens = 0;
  double avgdl = 0.0;
  TokenStatMap df;  // documents containing the token at least once
  TokenStatMap cf;  // total occurrences across the collection
};

// Builds stats over the dataset's documents, deduplicated by doc_id (first
// occurrence wins). The OpenMP build merges per-thread integer counts, which
// commute, so it equals the serial build exactly.
CollectionStats build_stats(const Dataset& dataset, Field field);
CollectionStats build_stats_serial(const Dataset& dataset, Field field);

// Versioned line-based text persistence; round-trip is lossless.
void save_stats(const CollectionStats& stats, const std::string& path);
CollectionStats load_stats(const std::string& path);

}  // namespace rankfuse

#endif  // RANKFUSE_STATS_HPP_
