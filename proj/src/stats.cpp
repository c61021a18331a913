// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/stats.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "rankfuse/parallel.hpp"

namespace rankfuse {

std::string field_name(Field field) {
  switch (field) {
    case Field::kTitle:
      return "title";
    case Field::kContent:
      return "content";
    case Field::kTitleContent:
      return "title_content";
  }
  return "title_content";
}

Field parse_field(const std::string& name) {
  if (name == "title") return Field::kTitle;
  if (name == "content") return Field::kContent;
  if (name == "title_content") return Field::kTitleContent;
  throw DataError("unknown field: " + name);
}

TokenSeq field_tokens(const Document& doc, Field field) {
  switch (field) {
    case Field::kTitle:
      return doc.title;
    case Field::kContent:
      return doc.content;
    case Field::kTitleContent:
      return doc.title_content();
  }
  return doc.title_content();
}

void TokenStatMap::add(Token t, std::uint64_t n) {
  if (dense_) {
    if (t >= dense_counts_.size()) dense_counts_.resize(static_cast<std::size_t>(t) + 1, 0);
    dense_counts_[t] += n;
    return;
  }
  sparse_counts_[t] += n;
}

void TokenStatMap::merge(const TokenStatMap& other) {
  other.for_each_sorted([this](Token t, std::uint64_t n) { add(t, n); });
}

std::size_t TokenStatMap::distinct() const {
  if (dense_) {
    return static_cast<std::size_t>(
        std::count_if(dense_counts_.begin(), dense_counts_.end(),
                      [](std::uint64_t c) { return c > 0; }));
  }
  return sparse_counts_.size();
}

void TokenStatMap::finalize() {
  if (dense_ || sparse_counts_.empty()) return;
  Token max_token = 0;
  for (const auto& [t, c] : sparse_counts_) max_token = std::max(max_token, t);
  // Dense pays off when ids are packed; 4x slack tolerates small gaps.
  constexpr Token kDenseCap = 1u << 22;
  const std::size_t span = static_cast<std::size_t>(max_token) + 1;
  if (max_token < kDenseCap && span <= 4 * sparse_counts_.size()) {
    dense_counts_.assign(span, 0);
    for (const auto& [t, c] : sparse_counts_) dense_counts_[t] = c;
    sparse_counts_.clear();
    dense_ = true;
  }
}

void TokenStatMap::for_each_sorted(const std::function<void(Token, std::uint64_t)>& fn) const {
  if (dense_) {
    for (std::size_t t = 0; t < dense_counts_.size(); ++t) {
      if (dense_counts_[t] > 0) fn(static_cast<Token>(t), dense_counts_[t]);
    }
    return;
  }
  std::vector<Token> tokens;
  tokens.reserve(sparse_counts_.size());
  for (const auto& [t, c] : sparse_counts_) tokens.push_back(t);
  std::sort(tokens.begin(), tokens.end());
  for (Token t : tokens) fn(t, sparse_counts_.at(t));
}

namespace {

// Indices of the first example carrying each doc_id, in dataset order.
std::vector<std::size_t> dedup_doc_indices(const Dataset& dataset) {
  std::vector<std::size_t> kept;
  std::unordered_set<std::string_view> seen;
  kept.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (seen.insert(dataset.examples[i].document.doc_id).second) kept.push_back(i);
  }
  return kept;
}

void count_document(const Document& doc, Field field, TokenStatMap& df, TokenStatMap& cf,
                    std::uint64_t& total_tokens) {
  std::map<Token, std::uint64_t> in_doc;
  auto scan = [&in_doc, &total_tokens](const TokenSeq& seq) {
    for (Token t : seq) ++in_doc[t];
    total_tokens += seq.size();
  };
  if (field == Field::kTitle || field == Field::kTitleContent) scan(doc.title);
  if (field == Field::kContent || field == Field::kTitleContent) scan(doc.content);
  for (const auto& [t, c] : in_doc) {
    df.add(t, 1);
    cf.add(t, c);
  }
}

void finish(CollectionStats& stats) {
  stats.df.finalize();
  stats.cf.finalize();
  stats.avgdl = stats.num_docs == 0
                    ? 0.0
                    : static_cast<double>(stats.total_tokens) / static_cast<double>(stats.num_docs);
}

}  // namespace

CollectionStats build_stats_serial(const Dataset& dataset, Field field) {
  CollectionStats stats;
  stats.field = field;
  auto docs = dedup_doc_indices(dataset);
  stats.num_docs = docs.size();
  for (std::size_t idx : docs) {
    count_document(dataset.examples[idx].document, field, stats.df, stats.cf, stats.total_tokens);
  }
  finish(stats);
  return stats;
}

CollectionStats build_stats(const Dataset& dataset, Field field) {
  const int threads = parallel::max_threads();
  auto docs = dedup_doc_indices(dataset);
  if (threads <= 1 || docs.size() < 2) {
    return build_stats_serial(dataset, field);
  }

  struct Partial {
    TokenStatMap df, cf;
    std::uint64_t total_tokens = 0;
  };
  std::vector<Partial> partials(static_cast<std::size_t>(threads));
#pragma omp parallel num_threads(threads)
  {
    Partial& mine = partials[static_cast<std::size_t>(parallel::thread_index())];
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(docs.size()); ++i) {
      count_document(dataset.examples[docs[static_cast<std::size_t>(i)]].document, field, mine.df,
                     mine.cf, mine.total_tokens);
    }
  }

  CollectionStats stats;
  stats.field = field;
  stats.num_docs = docs.size();
  for (const Partial& p : partials) {
    stats.df.merge(p.df);
    stats.cf.merge(p.cf);
    stats.total_tokens += p.total_tokens;
  }
  finish(stats);
  return stats;
}

void save_stats(const CollectionStats& stats, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << "rankfuse-stats v1\n";
  out << "field " << field_name(stats.field) << '\n';
  out << "num_docs " << stats.num_docs << '\n';
  out << "total_tokens " << stats.total_tokens << '\n';
  stats.df.for_each_sorted([&out, &stats](Token t, std::uint64_t df_count) {
    out << t << ' ' << df_count << ' ' << stats.cf.get(t) << '\n';
  });
  out << "end\n";
  if (!out) throw DataError("write failed: " + path);
}

CollectionStats load_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError("unexpected end of stats file", line_no);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next_line();
  if (line != "rankfuse-stats v1") throw ParseError("bad stats header '" + line + "'", line_no);

  CollectionStats stats;
  next_line();
  {
    std::istringstream ls(line);
    std::string key, value;
    if (!(ls >> key >> value) || key != "field") throw ParseError("expected field line", line_no);
    stats.field = parse_field(value);
  }
  auto read_u64 = [&](const char* key_name) {
    next_line();
    std::istringstream ls(line);
    std::string key;
    std::uint64_t value = 0;
    if (!(ls >> key >> value) || key != key_name) {
      throw ParseError(std::string("expected ") + key_name + " line", line_no);
    }
    return value;
  };
  stats.num_docs = read_u64("num_docs");
  stats.total_tokens = read_u64("total_tokens");

  while (true) {
    next_line();
    if (line == "end") break;
    std::istringstream ls(line);
    std::uint64_t token = 0, df_count = 0, cf_count = 0;
    if (!(ls >> token >> df_count >> cf_count)) {
      throw ParseError("malformed stats entry '" + line + "'", line_no);
    }
    std::string extra;
    if (ls >> extra) throw ParseError("trailing data in stats entry", line_no);
    if (df_count > stats.num_docs) throw ParseError("df exceeds num_docs", line_no);
    stats.df.add(static_cast<Token>(token), df_count);
    stats.cf.add(static_cast<Token>(token), cf_count);
  }
  stats.df.finalize();
  stats.cf.finalize();
  stats.avgdl = stats.num_docs == 0
                    ? 0.0
                    : static_cast<double>(stats.total_tokens) / static_cast<double>(stats.num_docs);
  return stats;
}

}  // namespace rankfuse
