// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_TYPES_HPP_
#define RANKFUSE_TYPES_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankfuse {

/// Vocabulary identifier of a pre-tokenized term.
using Token = std::uint32_t;

/// Ordered token sequence; may be empty.
using TokenSeq = std::vector<Token>;

struct Document {
  std::string doc_id;
  TokenSeq title;
  TokenSeq content;

  // "title+content" is always the concatenation title then content.
  TokenSeq title_content() const {
    TokenSeq out;
    out.reserve(title.size() + content.size());
    out.insert(out.end(), title.begin(), title.end());
    out.insert(out.end(), content.begin(), content.end());
    return out;
  }
};

struct Query {
  std::int64_t qid = 0;
  TokenSeq tokens;
  std::optional<std::uint64_t> monthly_freq;
};

/// Relevance grades span 0 (irrelevant) to 4 (highly relevant).
inline constexpr int kMinLabel = 0;
inline constexpr int kMaxLabel = 4;

struct LabeledExample {
  Query query;
  Document document;
  int label = 0;
};

struct Dataset {
  std::vector<LabeledExample> examples;

  bool empty() const { return examples.empty(); }
  std::size_t size() const { return examples.size(); }
};

struct SessionResult {
  std::string doc_id;
  bool clicked = false;
};

struct SessionRecord {
  Query query;
  std::vector<SessionResult> results;
};

/// Top-k most frequent tokens of a corpus. Tokens kept sorted ascending.
struct StopwordSet {
  std::vector<Token> tokens;
  std::size_t k = 0;

  bool contains(Token t) const {
    auto it = std::lower_bound(tokens.begin(), tokens.end(), t);
    return it != tokens.end() && *it == t;
  }
  std::size_t size() const { return tokens.size(); }
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent data (empty collection, label out of range, ...).
struct DataError : Error {
  using Error::Error;
};

/// Malformed input file; carries the 1-based offending line.
struct ParseError : DataError {
  ParseError(const std::string& what, std::size_t line)
      : DataError(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
  std::size_t line_number = 0;
};

}  // namespace rankfuse

#endif  // RANKFUSE_TYPES_HPP_
