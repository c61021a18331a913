// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace rankfuse {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

template <typename Int>
Int parse_int(std::string_view text, const char* what, std::size_t line_no) {
  Int value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(text) + "'", line_no);
  }
  return value;
}

TokenSeq parse_tokens(std::string_view text, const char* what, std::size_t line_no) {
  TokenSeq tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t space = text.find(' ', pos);
    std::string_view piece =
        space == std::string_view::npos ? text.substr(pos) : text.substr(pos, space - pos);
    if (piece.empty()) {
      throw ParseError(std::string("empty token in ") + what, line_no);
    }
    tokens.push_back(parse_int<Token>(piece, what, line_no));
    if (space == std::string_view::npos) break;
    pos = space + 1;
  }
  return tokens;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

Dataset parse_dataset_stream(std::istream& in) {
  Dataset dataset;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_cr(std::move(raw));
    auto cols = split_tabs(line);
    if (cols.size() != 6) {
      throw ParseError("expected 6 tab-separated columns, got " + std::to_string(cols.size()),
                       line_no);
    }
    LabeledExample ex;
    ex.query.qid = parse_int<std::int64_t>(cols[0], "qid", line_no);
    if (ex.query.qid < 0) throw ParseError("negative qid", line_no);
    ex.query.tokens = parse_tokens(cols[1], "query tokens", line_no);
    ex.document.title = parse_tokens(cols[2], "title tokens", line_no);
    ex.document.content = parse_tokens(cols[3], "content tokens", line_no);
    int label = parse_int<int>(cols[4], "label", line_no);
    if (label < kMinLabel || label > kMaxLabel) {
      throw ParseError("label " + std::to_string(label) + " outside 0..4", line_no);
    }
    ex.label = label;
    if (cols[5] != "-") {
      ex.query.monthly_freq = parse_int<std::uint64_t>(cols[5], "monthly_freq", line_no);
    }
    // Annotation lines carry no doc id; derive a stable one from the line.
    ex.document.doc_id = "d" + std::to_string(line_no);
    dataset.examples.push_back(std::move(ex));
  }
  return dataset;
}

std::vector<SessionRecord> parse_sessions_stream(std::istream& in) {
  std::vector<SessionRecord> sessions;
  std::string raw;
  std::size_t line_no = 0;
  bool have_current = false;
  std::int64_t current_qid = -1;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_cr(std::move(raw));
    auto cols = split_tabs(line);
    if (cols.size() != 4) {
      throw ParseError("expected 4 tab-separated columns, got " + std::to_string(cols.size()),
                       line_no);
    }
    std::int64_t qid = parse_int<std::int64_t>(cols[0], "qid", line_no);
    if (qid < 0) throw ParseError("negative qid", line_no);
    TokenSeq tokens = parse_tokens(cols[1], "query tokens", line_no);
    if (cols[2].empty()) throw ParseError("empty doc_id", line_no);
    if (cols[3] != "0" && cols[3] != "1") {
      throw ParseError("clicked flag must be 0 or 1", line_no);
    }
    if (!have_current || qid != current_qid) {
      SessionRecord rec;
      rec.query.qid = qid;
      rec.query.tokens = std::move(tokens);
      sessions.push_back(std::move(rec));
      current_qid = qid;
      have_current = true;
    }
    sessions.back().results.push_back(SessionResult{std::string(cols[2]), cols[3] == "1"});
  }
  return sessions;
}

std::string tokens_to_string(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(tokens[i]);
  }
  return out;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  return in;
}

}  // namespace

Dataset parse_dataset(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_dataset_stream(in);
}

Dataset parse_dataset_text(const std::string& text) {
  std::istringstream in(text);
  return parse_dataset_stream(in);
}

void write_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (const auto& ex : dataset.examples) {
    out << ex.query.qid << '\t' << tokens_to_string(ex.query.tokens) << '\t'
        << tokens_to_string(ex.document.title) << '\t' << tokens_to_string(ex.document.content)
        << '\t' << ex.label << '\t';
    if (ex.query.monthly_freq) {
      out << *ex.query.monthly_freq;
    } else {
      out << '-';
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

std::vector<SessionRecord> parse_sessions(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_sessions_stream(in);
}

std::vector<SessionRecord> parse_sessions_text(const std::string& text) {
  std::istringstream in(text);
  return parse_sessions_stream(in);
}

Dataset remap_qids(const Dataset& dataset) {
  Dataset out;
  out.examples.reserve(dataset.size());
  std::map<TokenSeq, std::int64_t> by_tokens;
  std::int64_t next = 0;
  for (const auto& ex : dataset.examples) {
    auto [it, inserted] = by_tokens.try_emplace(ex.query.tokens, next);
    if (inserted) ++next;
    LabeledExample copy = ex;
    copy.query.qid = it->second;
    out.examples.push_back(std::move(copy));
  }
  return out;
}

StopwordSet extract_stopwords(const Dataset& dataset, std::size_t k, StopwordFields fields) {
  if (k == 0) throw DataError("stopword cutoff k must be positive");
  std::unordered_map<Token, std::uint64_t> counts;
  auto count_seq = [&counts](const TokenSeq& seq) {
    for (Token t : seq) ++counts[t];
  };
  for (const auto& ex : dataset.examples) {
    if (fields.query) count_seq(ex.query.tokens);
    if (fields.title) count_seq(ex.document.title);
    if (fields.content) count_seq(ex.document.content);
  }
  std::vector<std::pair<Token, std::uint64_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  StopwordSet set;
  set.k = k;
  const std::size_t take = std::min(k, ranked.size());
  set.tokens.reserve(take);
  for (std::size_t i = 0; i < take; ++i) set.tokens.push_back(ranked[i].first);
  std::sort(set.tokens.begin(), set.tokens.end());
  return set;
}

void save_stopwords(const StopwordSet& stopwords, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << "rankfuse-stopwords v1\n";
  out << "k " << stopwords.k << '\n';
  for (Token t : stopwords.tokens) out << t << '\n';
  out << "end\n";
  if (!out) throw DataError("write failed: " + path);
}

StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::string raw;
  std::size_t line_no = 0;
  auto next = [&]() {
    if (!std::getline(in, raw)) throw ParseError("unexpected end of stopword file", line_no);
    ++line_no;
    return strip_cr(std::move(raw));
  };
  if (next() != "rankfuse-stopwords v1") throw ParseError("bad stopword header", line_no);
  StopwordSet set;
  {
    std::string line = next();
    if (!line.starts_with("k ")) throw ParseError("expected 'k <count>'", line_no);
    set.k = parse_int<std::size_t>(std::string_view(line).substr(2), "stopword k", line_no);
  }
  while (true) {
    std::string line = next();
    if (line == "end") break;
    const Token t = parse_int<Token>(line, "stopword token", line_no);
    if (!set.tokens.empty() && t <= set.tokens.back()) {
      throw ParseError("stopword tokens must be strictly ascending", line_no);
    }
    set.tokens.push_back(t);
  }
  if (set.tokens.size() > set.k) throw ParseError("more stopwords than k", line_no);
  return set;
}

std::vector<Query> parse_query_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<Query> queries;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_cr(std::move(raw));
    Query query;
    query.qid = static_cast<std::int64_t>(line_no - 1);
    query.tokens = parse_tokens(line, "query tokens", line_no);
    queries.push_back(std::move(query));
  }
  return queries;
}

namespace {

std::map<Token, std::uint32_t> count_vector(const TokenSeq& seq) {
  std::map<Token, std::uint32_t> counts;
  for (Token t : seq) ++counts[t];
  return counts;
}

}  // namespace

double query_similarity(const TokenSeq& a, const TokenSeq& b) {
  if (a.empty() || b.empty()) return 0.0;
  auto ca = count_vector(a);
  auto cb = count_vector(b);
  if (ca == cb) return 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, c] : ca) {
    na += static_cast<double>(c) * c;
    auto it = cb.find(t);
    if (it != cb.end()) dot += static_cast<double>(c) * it->second;
  }
  for (const auto& [t, c] : cb) nb += static_cast<double>(c) * c;
  double sim = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(sim, 0.0, 1.0);
}

std::vector<Query> filter_by_similarity(const std::vector<Query>& candidates,
                                        const std::vector<Query>& reference, double threshold) {
  if (threshold < 0.0 || threshold > 1.0) {
    throw DataError("similarity threshold must lie in [0, 1]");
  }
  std::vector<Query> kept;
  for (const auto& cand : candidates) {
    double best = 0.0;
    for (const auto& ref : reference) {
      best = std::max(best, query_similarity(cand.tokens, ref.tokens));
      if (best >= threshold) break;
    }
    if (best >= threshold) kept.push_back(cand);
  }
  return kept;
}

std::vector<SessionRecord> filter_clickless(const std::vector<SessionRecord>& sessions) {
  std::vector<SessionRecord> kept;
  for (const auto& rec : sessions) {
    bool clicked = std::any_of(rec.results.begin(), rec.results.end(),
                               [](const SessionResult& r) { return r.clicked; });
    if (clicked) kept.push_back(rec);
  }
  return kept;
}

std::vector<QidGroup> group_by_qid(const Dataset& dataset) {
  std::map<std::int64_t, std::vector<std::size_t>> by_qid;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_qid[dataset.examples[i].query.qid].push_back(i);
  }
  std::vector<QidGroup> groups;
  groups.reserve(by_qid.size());
  for (auto& [qid, indices] : by_qid) {
    groups.push_back(QidGroup{qid, std::move(indices)});
  }
  return groups;
}

namespace {

// ceil(fraction * q) with a relative guard so that e.g. 0.2 * 10 lands on 2
// rather than 3 from the binary representation of 0.2.
std::size_t guarded_ceil(double fraction, std::size_t q) {
  double x = fraction * static_cast<double>(q);
  double n = std::ceil(x * (1.0 - 1e-12) - 1e-12);
  if (n < 0.0) n = 0.0;
  auto result = static_cast<std::size_t>(n);
  return std::min(result, q);
}

}  // namespace

SplitResult split_by_similarity(const Dataset& dataset, const std::vector<Query>& test_queries,
                                double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw DataError("split fraction must lie in (0, 1)");
  }
  if (dataset.empty()) throw DataError("cannot split an empty dataset");

  auto groups = group_by_qid(dataset);
  const std::size_t q_count = groups.size();
  const std::size_t n_valid = guarded_ceil(fraction, q_count);

  SplitResult result;
  std::vector<std::int64_t> valid_qids;
  if (test_queries.empty()) {
    // Fallback: the last n_valid qids form the validation set.
    result.fallback_used = true;
    for (std::size_t i = q_count - n_valid; i < q_count; ++i) {
      valid_qids.push_back(groups[i].qid);
    }
  } else {
    struct Scored {
      std::int64_t qid;
      double score;
    };
    std::vector<Scored> scored(q_count);
    for (std::size_t g = 0; g < q_count; ++g) {
      const TokenSeq& tokens = dataset.examples[groups[g].indices.front()].query.tokens;
      double best = 0.0;
      for (const auto& tq : test_queries) {
        best = std::max(best, query_similarity(tokens, tq.tokens));
      }
      scored[g] = Scored{groups[g].qid, best};
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.qid < b.qid;
    });
    for (std::size_t i = 0; i < n_valid; ++i) valid_qids.push_back(scored[i].qid);
  }

  std::sort(valid_qids.begin(), valid_qids.end());
  auto in_valid = [&valid_qids](std::int64_t qid) {
    return std::binary_search(valid_qids.begin(), valid_qids.end(), qid);
  };
  for (const auto& ex : dataset.examples) {
    (in_valid(ex.query.qid) ? result.valid : result.train).examples.push_back(ex);
  }
  return result;
}

}  // namespace rankfuse
