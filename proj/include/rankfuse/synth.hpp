// SPDX-License-Identifier: Apache-2.0
//
// Seeded generators for corpora and feature sets with known structure. They
// back the trainer and grid-search checks and produce the bundled demo data.
#ifndef RANKFUSE_SYNTH_HPP_
#define RANKFUSE_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "rankfuse/features.hpp"
#include "rankfuse/types.hpp"

namespace rankfuse {

struct ExternalScoreRow {
  std::int64_t qid = 0;
  std::string doc_id;
  double score = 0.0;
};

void write_external_scores(const std::vector<ExternalScoreRow>& rows, const std::string& path);

// One query per line, space-separated token ids; qids are line numbers.
void write_query_file(const std::vector<Query>& queries, const std::string& path);

struct LexicalSynthConfig {
  std::size_t num_queries = 120;
  std::size_t docs_per_query = 10;
  std::size_t num_test_queries = 12;
  Token vocab_size = 600;
  std::uint64_t seed = 1;
};

struct SynthCorpus {
  Dataset dataset;
  std::vector<Query> test_queries;  // mutated corpus queries plus fresh draws
};

// Graded web-search imitation: documents carry query-term matches whose
// density, placement and proximity drive a latent relevance mix; labels are
// the within-group rank of that mix plus noise, quantized to 0..4. No single
// lexical feature reconstructs the mix, a weighted combination does.
SynthCorpus synth_lexical_corpus(const LexicalSynthConfig& config);

// Noisy label echo standing in for a neural scorer. Keys follow the given
// dataset's doc ids, so generate this after any write/parse round trip that
// renumbers documents.
std::vector<ExternalScoreRow> synth_external_scores(const Dataset& dataset, std::uint64_t seed);

// Five fixed groups, one single-token query each. Every group has one short
// relevant document (label 4) and one long stuffed document (label 0) whose
// BM25 order flips at a group-specific b threshold (0.16, 0.29, 0.47, 0.68,
// 0.95); k1 cancels out of every comparison. Over the grid b in {0, 0.2, ...,
// 1.0} the mean DCG@10 strictly increases with b, so the largest b wins.
Dataset synth_length_decisive_corpus();

// Feature-space set: values[informative_id] equals label/4, every other
// active slot is seeded uniform noise in [0,1].
std::vector<FeatureVector> synth_single_informative(std::size_t num_queries,
                                                    std::size_t docs_per_query,
                                                    int informative_id, std::uint64_t seed);

// Feature-space set: per group labels are a seeded shuffle of {2,1,0};
// feature 1 indicates label >= 1 and feature 2 indicates label == 2, so the
// pair separates the grades exactly while neither alone does.
std::vector<FeatureVector> synth_two_feature_separable(std::size_t num_groups,
                                                       std::uint64_t seed);

}  // namespace rankfuse

#endif  // RANKFUSE_SYNTH_HPP_
