// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/features.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "rankfuse/parallel.hpp"

namespace rankfuse {

const std::array<FeatureDescriptor, kNumFeatures>& feature_schema() {
  static const std::array<FeatureDescriptor, kNumFeatures> schema = {{
      {1, "cross_encoder"},
      {2, "query_length"},
      {3, "title_length"},
      {4, "content_length"},
      {5, "query_freq"},
      {6, "BM25"},
      {7, "QLD"},
      {8, "BM25_title"},
      {9, "BM25_content"},
      {10, "TF-IDF"},
      {11, "TF"},
      {12, "IDF"},
      {13, "PROX-1"},
      {14, "PROX-2"},
      {15, "PROX-3"},
      {16, "PROX-4"},
      {17, "PROX-1-nonstop"},
      {18, "PROX-2-nonstop"},
      {19, "PROX-3-nonstop"},
      {20, "PROX-4-nonstop"},
  }};
  return schema;
}

std::string_view feature_name(int id) {
  if (id < 1 || id > kNumFeatures) {
    throw DataError("feature id " + std::to_string(id) + " outside 1..20");
  }
  return feature_schema()[static_cast<std::size_t>(id - 1)].name;
}

std::string ExternalScores::key(std::int64_t qid, const std::string& doc_id) {
  return std::to_string(qid) + '\t' + doc_id;
}

void ExternalScores::set(std::int64_t qid, const std::string& doc_id, double score) {
  scores_[key(qid, doc_id)] = score;
}

double ExternalScores::lookup(std::int64_t qid, const std::string& doc_id) const {
  auto it = scores_.find(key(qid, doc_id));
  return it == scores_.end() ? default_ : it->second;
}

ExternalScores ExternalScores::load(const std::string& path, double default_score) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  ExternalScores scores(default_score);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw ParseError("expected qid \\t doc_id \\t score", line_no);
    }
    std::int64_t qid = 0;
    {
      auto [ptr, ec] = std::from_chars(line.data(), line.data() + t1, qid);
      if (ec != std::errc{} || ptr != line.data() + t1 || qid < 0) {
        throw ParseError("invalid qid", line_no);
      }
    }
    const std::string doc_id = line.substr(t1 + 1, t2 - t1 - 1);
    if (doc_id.empty()) throw ParseError("empty doc_id", line_no);
    double score = 0.0;
    {
      const char* begin = line.data() + t2 + 1;
      const char* end = line.data() + line.size();
      auto [ptr, ec] = std::from_chars(begin, end, score);
      if (ec != std::errc{} || ptr != end) throw ParseError("invalid score", line_no);
    }
    scores.set(qid, doc_id, score);
  }
  return scores;
}

FreqBucketizer FreqBucketizer::fit(const std::vector<Query>& queries, Mode mode) {
  std::vector<std::uint64_t> freqs;
  freqs.reserve(queries.size());
  for (const auto& q : queries) {
    if (q.monthly_freq) freqs.push_back(*q.monthly_freq);
  }
  if (freqs.empty()) throw DataError("no query has a known monthly frequency");
  std::sort(freqs.begin(), freqs.end());

  FreqBucketizer out;
  const std::size_t n = freqs.size();
  if (mode == Mode::kQuantile) {
    // Descending thresholds at the 90th..10th percentile (nearest-rank).
    for (int k = 1; k <= 9; ++k) {
      const std::size_t rank = (static_cast<std::size_t>(10 - k) * n + 9) / 10;  // ceil, 1-based
      out.thresholds_[static_cast<std::size_t>(k - 1)] =
          static_cast<double>(freqs[std::max<std::size_t>(rank, 1) - 1]);
    }
  } else {
    const double lo = static_cast<double>(freqs.front());
    const double hi = static_cast<double>(freqs.back());
    const double width = (hi - lo) / 10.0;
    for (int k = 1; k <= 9; ++k) {
      out.thresholds_[static_cast<std::size_t>(k - 1)] = lo + width * static_cast<double>(10 - k);
    }
  }
  return out;
}

int FreqBucketizer::bucket(std::optional<std::uint64_t> monthly_freq) const {
  if (!monthly_freq) return 9;
  const double f = static_cast<double>(*monthly_freq);
  int bucket = 0;
  for (double t : thresholds_) {
    if (t > f) ++bucket;
  }
  return bucket;
}

FeatureVector extract_features(const LabeledExample& example, const StatsBundle& stats,
                               const StopwordSet& stopwords, const ExternalScores& external,
                               const FreqBucketizer& bucketizer, const ScoreParams& params) {
  FeatureVector fv;
  fv.qid = example.query.qid;
  fv.doc_id = example.document.doc_id;
  fv.label = example.label;

  const TokenSeq& query = example.query.tokens;
  const TokenSeq& title = example.document.title;
  const TokenSeq& content = example.document.content;
  const TokenSeq both = example.document.title_content();

  fv.set(1, external.lookup(example.query.qid, example.document.doc_id));
  fv.set(2, static_cast<double>(query.size()));
  fv.set(3, static_cast<double>(title.size()));
  fv.set(4, static_cast<double>(content.size()));
  fv.set(5, static_cast<double>(bucketizer.bucket(example.query.monthly_freq)));

  fv.set(6, bm25(query, both, stats.title_content, params.bm25));
  // An empty document has no language model to smooth; score it 0.
  fv.set(7, both.empty() ? 0.0 : qld(query, both, stats.title_content, params.qld));
  fv.set(8, bm25(query, title, stats.title, params.bm25));
  fv.set(9, bm25(query, content, stats.content, params.bm25));

  const TfIdfParts parts = tfidf_parts(query, both, stats.title_content);
  fv.set(10, parts.tf_idf);
  fv.set(11, parts.tf_sum);
  fv.set(12, parts.idf_sum);

  const ProxFeatures prox = prox_features(query, both, stopwords);
  fv.set(13, prox.stop_removed.avg_pair_distance);
  fv.set(14, prox.stop_removed.mean_first_position);
  fv.set(15, static_cast<double>(prox.stop_removed.pairs_within_5));
  fv.set(16, static_cast<double>(prox.stop_removed.pairs_within_10));
  fv.set(17, prox.stop_kept.avg_pair_distance);
  fv.set(18, prox.stop_kept.mean_first_position);
  fv.set(19, static_cast<double>(prox.stop_kept.pairs_within_5));
  fv.set(20, static_cast<double>(prox.stop_kept.pairs_within_10));
  return fv;
}

std::vector<FeatureVector> extract_batch_serial(const Dataset& dataset, const StatsBundle& stats,
                                                const StopwordSet& stopwords,
                                                const ExternalScores& external,
                                                const FreqBucketizer& bucketizer,
                                                const ScoreParams& params) {
  std::vector<FeatureVector> out(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out[i] = extract_features(dataset.examples[i], stats, stopwords, external, bucketizer, params);
  }
  return out;
}

std::vector<FeatureVector> extract_batch(const Dataset& dataset, const StatsBundle& stats,
                                         const StopwordSet& stopwords,
                                         const ExternalScores& external,
                                         const FreqBucketizer& bucketizer,
                                         const ScoreParams& params) {
  std::vector<FeatureVector> out(dataset.size());
#pragma omp parallel for schedule(static) num_threads(parallel::max_threads())
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(dataset.size()); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    out[idx] =
        extract_features(dataset.examples[idx], stats, stopwords, external, bucketizer, params);
  }
  return out;
}

}  // namespace rankfuse
