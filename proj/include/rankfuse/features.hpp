// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_FEATURES_HPP_
#define RANKFUSE_FEATURES_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rankfuse/prox.hpp"
#include "rankfuse/scorers.hpp"
#include "rankfuse/stats.hpp"
#include "rankfuse/types.hpp"

namespace rankfuse {

inline constexpr int kNumFeatures = 20;

struct FeatureDescriptor {
  int id;  // 1-based feature id
  std::string_view name;
};

/// The fixed 20-feature schema, in id order.
const std::array<FeatureDescriptor, kNumFeatures>& feature_schema();

/// Name for a feature id (1..20); throws DataError outside that range.
std::string_view feature_name(int id);

struct FeatureVector {
  std::int64_t qid = 0;
  std::string doc_id;
  int label = 0;
  std::array<double, kNumFeatures> values{};  // values[i] holds feature id i+1

  double get(int id) const { return values[static_cast<std::size_t>(id - 1)]; }
  void set(int id, double v) { values[static_cast<std::size_t>(id - 1)] = v; }
};

/// Externally produced per-(qid, doc_id) scores (e.g. a neural relevance
/// model). Lookups never fail; missing pairs yield the default.
class ExternalScores {
 public:
  ExternalScores() = default;
  explicit ExternalScores(double default_score) : default_(default_score) {}

  // Sidecar TSV: qid \t doc_id \t score, one pair per line.
  static ExternalScores load(const std::string& path, double default_score = 0.0);

  void set(std::int64_t qid, const std::string& doc_id, double score);
  double lookup(std::int64_t qid, const std::string& doc_id) const;
  std::size_t size() const { return scores_.size(); }

 private:
  static std::string key(std::int64_t qid, const std::string& doc_id);
  std::unordered_map<std::string, double> scores_;
  double default_ = 0.0;
};

/// Maps monthly search frequency into 10 buckets; bucket 0 holds the most
/// frequent queries, unknown frequencies land in bucket 9.
class FreqBucketizer {
 public:
  enum class Mode { kQuantile, kEqualWidth };

  /// Fits thresholds from the queries with a known frequency; throws
  /// DataError when none has one.
  static FreqBucketizer fit(const std::vector<Query>& queries, Mode mode = Mode::kQuantile);

  int bucket(std::optional<std::uint64_t> monthly_freq) const;

  const std::array<double, 9>& thresholds() const { return thresholds_; }

 private:
  std::array<double, 9> thresholds_{};  // descending
};

struct StatsBundle {
  CollectionStats title;
  CollectionStats content;
  CollectionStats title_content;
};

struct ScoreParams {
  Bm25Params bm25;
  QldParams qld;
};

// Fills all 20 slots of the schema. The QLD slot is defined as 0 for a
// document with no tokens; every other slot is the corresponding scorer or
// axiom value. Throws DataError when the stats describe an empty collection.
FeatureVector extract_features(const LabeledExample& example, const StatsBundle& stats,
                               const StopwordSet& stopwords, const ExternalScores& external,
                               const FreqBucketizer& bucketizer, const ScoreParams& params);

// Per-example map over the dataset, output in dataset order. The OpenMP
// variant writes each row into its own slot, so it equals the serial map
// bit for bit.
std::vector<FeatureVector> extract_batch(const Dataset& dataset, const StatsBundle& stats,
                                         const StopwordSet& stopwords,
                                         const ExternalScores& external,
                                         const FreqBucketizer& bucketizer,
                                         const ScoreParams& params);
std::vector<FeatureVector> extract_batch_serial(const Dataset& dataset, const StatsBundle& stats,
                                                const StopwordSet& stopwords,
                                                const ExternalScores& external,
                                                const FreqBucketizer& bucketizer,
                                                const ScoreParams& params);

}  // namespace rankfuse

#endif  // RANKFUSE_FEATURES_HPP_
