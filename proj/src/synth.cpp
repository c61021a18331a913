// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "rankfuse/rng.hpp"
#include "rankfuse/util.hpp"

namespace rankfuse {

void write_external_scores(const std::vector<ExternalScoreRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (const auto& row : rows) {
    out << row.qid << '\t' << row.doc_id << '\t' << format_double(row.score) << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

void write_query_file(const std::vector<Query>& queries, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (const auto& query : queries) {
    for (std::size_t i = 0; i < query.tokens.size(); ++i) {
      if (i > 0) out << ' ';
      out << query.tokens[i];
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

namespace {

Token background_token(std::mt19937_64& rng, Token vocab_size) {
  // Cubing the uniform skews mass toward small ids, giving a natural
  // stopword-like head to the distribution.
  const double u = uniform01(rng);
  auto t = static_cast<Token>(1 + u * u * u * static_cast<double>(vocab_size));
  return std::min(t, vocab_size);
}

Token mid_token(std::mt19937_64& rng, Token vocab_size) {
  const double u = uniform01(rng);
  const auto lo = static_cast<double>(vocab_size / 10 + 1);
  auto t = static_cast<Token>(lo + u * (static_cast<double>(vocab_size) - lo));
  return std::min(t, vocab_size);
}

TokenSeq draw_query_tokens(std::mt19937_64& rng, Token vocab_size) {
  const std::size_t len = 2 + static_cast<std::size_t>(uniform_below(rng, 4));
  TokenSeq tokens;
  while (tokens.size() < len) {
    const Token t = mid_token(rng, vocab_size);
    if (std::find(tokens.begin(), tokens.end(), t) == tokens.end()) tokens.push_back(t);
  }
  return tokens;
}

std::string padded_doc_id(std::size_t index) {
  std::string id = std::to_string(index);
  if (id.size() < 2) id.insert(0, "0");
  return "d" + id;
}

}  // namespace

SynthCorpus synth_lexical_corpus(const LexicalSynthConfig& config) {
  if (config.num_queries == 0 || config.docs_per_query == 0) {
    throw DataError("synth corpus needs at least one query and one document per query");
  }
  SynthCorpus corpus;
  std::mt19937_64 rng(mix_seed(config.seed, 0));

  for (std::size_t q = 0; q < config.num_queries; ++q) {
    Query query;
    query.qid = static_cast<std::int64_t>(q);
    query.tokens = draw_query_tokens(rng, config.vocab_size);
    if (uniform01(rng) < 0.85) {
      const double u = uniform01(rng);
      query.monthly_freq = static_cast<std::uint64_t>(std::exp(
          std::log(10.0) + u * (std::log(1e6) - std::log(10.0))));
    }

    struct Draft {
      Document doc;
      double mix = 0.0;
    };
    std::vector<Draft> drafts(config.docs_per_query);
    for (std::size_t d = 0; d < config.docs_per_query; ++d) {
      Draft& draft = drafts[d];
      draft.doc.doc_id = padded_doc_id(d);
      const double r = uniform01(rng);

      const std::size_t title_len = 4 + static_cast<std::size_t>(uniform_below(rng, 9));
      const double title_match = 0.08 + 0.55 * r;
      for (std::size_t i = 0; i < title_len; ++i) {
        if (uniform01(rng) < title_match) {
          draft.doc.title.push_back(
              query.tokens[uniform_below(rng, query.tokens.size())]);
        } else {
          draft.doc.title.push_back(background_token(rng, config.vocab_size));
        }
      }

      const std::size_t content_len = 20 + static_cast<std::size_t>(uniform_below(rng, 41));
      const double content_match = 0.05 + 0.35 * r;
      for (std::size_t i = 0; i < content_len; ++i) {
        if (uniform01(rng) < content_match) {
          draft.doc.content.push_back(
              query.tokens[uniform_below(rng, query.tokens.size())]);
        } else {
          draft.doc.content.push_back(background_token(rng, config.vocab_size));
        }
      }
      if (r > 0.55 && query.tokens.size() >= 2) {
        const std::size_t phrases = 1 + uniform_below(rng, 2);
        for (std::size_t p = 0; p < phrases; ++p) {
          const std::size_t at = uniform_below(rng, content_len - 1);
          draft.doc.content[at] = query.tokens[0];
          draft.doc.content[at + 1] = query.tokens[1];
        }
      }

      const auto is_query_token = [&](Token t) {
        return std::find(query.tokens.begin(), query.tokens.end(), t) != query.tokens.end();
      };
      double title_hits = 0.0, content_hits = 0.0, adjacent = 0.0;
      for (Token t : draft.doc.title) title_hits += is_query_token(t);
      for (Token t : draft.doc.content) content_hits += is_query_token(t);
      for (std::size_t i = 0; i + 1 < draft.doc.content.size(); ++i) {
        if (is_query_token(draft.doc.content[i]) && is_query_token(draft.doc.content[i + 1])) {
          adjacent += 1.0;
        }
      }
      draft.mix = 1.6 * title_hits / static_cast<double>(title_len) +
                  1.0 * content_hits / static_cast<double>(content_len) +
                  0.7 * std::min(adjacent, 4.0) / 4.0 + 0.45 * uniform01(rng);
    }

    std::vector<std::size_t> order(drafts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return drafts[a].mix > drafts[b].mix; });
    std::vector<int> labels(drafts.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      labels[order[pos]] = 4 - static_cast<int>(pos * 5 / order.size());
    }
    for (std::size_t d = 0; d < drafts.size(); ++d) {
      corpus.dataset.examples.push_back({query, std::move(drafts[d].doc), labels[d]});
    }
  }

  std::mt19937_64 test_rng(mix_seed(config.seed, 13));
  for (std::size_t t = 0; t < config.num_test_queries; ++t) {
    Query query;
    query.qid = static_cast<std::int64_t>(t);
    if (t % 2 == 0 && !corpus.dataset.examples.empty()) {
      // Mutate a corpus query so the similarity split has near matches.
      const std::size_t pick =
          uniform_below(test_rng, config.num_queries) * config.docs_per_query;
      query.tokens = corpus.dataset.examples[pick].query.tokens;
      query.tokens[uniform_below(test_rng, query.tokens.size())] =
          mid_token(test_rng, config.vocab_size);
    } else {
      query.tokens = draw_query_tokens(test_rng, config.vocab_size);
    }
    corpus.test_queries.push_back(std::move(query));
  }
  return corpus;
}

std::vector<ExternalScoreRow> synth_external_scores(const Dataset& dataset, std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 7));
  std::vector<ExternalScoreRow> rows;
  rows.reserve(dataset.examples.size());
  for (const auto& example : dataset.examples) {
    rows.push_back({example.query.qid, example.document.doc_id,
                    0.55 * example.label / 4.0 + 0.45 * uniform01(rng)});
  }
  return rows;
}

Dataset synth_length_decisive_corpus() {
  // Group parameters chosen so that within group g the short relevant
  // document outranks the stuffed one exactly when b exceeds
  //   b* = (c_p - c_s) / (c_s (l_p/A - 1) - c_p (l_s/A - 1))
  // with avgdl A = 100 enforced by the filler lengths below. k1 cancels in
  // the comparison because each query is a single term shared by both
  // documents.
  struct GroupSpec {
    std::uint64_t short_count, long_count, long_len;
    std::array<std::uint64_t, 3> filler_lens;
  };
  const GroupSpec specs[] = {
      {3, 4, 200, {100, 100, 80}},   // b* = 1/(3 + 3.2)            ~ 0.161
      {3, 5, 200, {100, 100, 80}},   // b* = 2/(3 + 4)              ~ 0.286
      {3, 7, 200, {100, 100, 80}},   // b* = 4/(3 + 5.6)            ~ 0.465
      {3, 11, 200, {100, 100, 80}},  // b* = 8/(3 + 8.8)            ~ 0.678
      {2, 24, 300, {60, 60, 60}},    // b* = 22/(2*2 + 0.8*24)      ~ 0.948
  };
  constexpr Token kFiller = 7;
  constexpr std::uint64_t kShortLen = 20;

  Dataset dataset;
  for (std::size_t g = 0; g < std::size(specs); ++g) {
    const GroupSpec& spec = specs[g];
    Query query;
    query.qid = static_cast<std::int64_t>(g);
    query.tokens = {static_cast<Token>(1000 + g)};

    auto make_doc = [&](std::size_t index, std::uint64_t len, std::uint64_t matches) {
      Document doc;
      doc.doc_id = padded_doc_id(index);
      doc.content.assign(len, kFiller);
      for (std::uint64_t i = 0; i < matches; ++i) doc.content[i * 2 + 1] = query.tokens[0];
      return doc;
    };
    dataset.examples.push_back({query, make_doc(0, kShortLen, spec.short_count), 4});
    dataset.examples.push_back({query, make_doc(1, spec.long_len, spec.long_count), 0});
    for (std::size_t f = 0; f < spec.filler_lens.size(); ++f) {
      dataset.examples.push_back({query, make_doc(2 + f, spec.filler_lens[f], 0), 0});
    }
  }
  return dataset;
}

std::vector<FeatureVector> synth_single_informative(std::size_t num_queries,
                                                    std::size_t docs_per_query,
                                                    int informative_id, std::uint64_t seed) {
  if (informative_id < 1 || informative_id > kNumFeatures) {
    throw DataError("informative feature id outside 1..20");
  }
  std::mt19937_64 rng(mix_seed(seed, 21));
  std::vector<FeatureVector> out;
  out.reserve(num_queries * docs_per_query);
  for (std::size_t q = 0; q < num_queries; ++q) {
    for (std::size_t d = 0; d < docs_per_query; ++d) {
      FeatureVector fv;
      fv.qid = static_cast<std::int64_t>(q);
      fv.doc_id = padded_doc_id(d);
      fv.label = static_cast<int>(uniform_below(rng, 5));
      for (int id = 1; id <= kNumFeatures; ++id) fv.set(id, uniform01(rng));
      fv.set(informative_id, fv.label / 4.0);
      out.push_back(std::move(fv));
    }
  }
  return out;
}

std::vector<FeatureVector> synth_two_feature_separable(std::size_t num_groups,
                                                       std::uint64_t seed) {
  std::mt19937_64 rng(mix_seed(seed, 22));
  std::vector<FeatureVector> out;
  out.reserve(num_groups * 3);
  for (std::size_t g = 0; g < num_groups; ++g) {
    std::array<int, 3> labels = {2, 1, 0};
    for (std::size_t i = labels.size() - 1; i > 0; --i) {
      std::swap(labels[i], labels[uniform_below(rng, i + 1)]);
    }
    for (std::size_t d = 0; d < labels.size(); ++d) {
      FeatureVector fv;
      fv.qid = static_cast<std::int64_t>(g);
      fv.doc_id = padded_doc_id(d);
      fv.label = labels[d];
      fv.set(1, labels[d] >= 1 ? 1.0 : 0.0);
      fv.set(2, labels[d] == 2 ? 1.0 : 0.0);
      out.push_back(std::move(fv));
    }
  }
  return out;
}

}  // namespace rankfuse
