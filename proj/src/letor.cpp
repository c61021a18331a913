// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/letor.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rankfuse/util.hpp"

namespace rankfuse {

std::string letor_line(const FeatureVector& fv) {
  std::string line = std::to_string(fv.label);
  line += " qid:";
  line += std::to_string(fv.qid);
  for (int id = 1; id <= kNumFeatures; ++id) {
    line += ' ';
    line += std::to_string(id);
    line += ':';
    line += format_double(fv.get(id));
  }
  line += " # ";
  line += fv.doc_id;
  return line;
}

void write_letor(const std::vector<FeatureVector>& vectors, const std::string& path) {
  std::vector<const FeatureVector*> order;
  order.reserve(vectors.size());
  for (const auto& fv : vectors) order.push_back(&fv);
  std::stable_sort(order.begin(), order.end(), [](const FeatureVector* a, const FeatureVector* b) {
    if (a->qid != b->qid) return a->qid < b->qid;
    return a->doc_id < b->doc_id;
  });
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  for (const FeatureVector* fv : order) out << letor_line(*fv) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

namespace {

std::vector<std::string_view> split_spaces(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    parts.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  return parts;
}

LetorFile read_letor_stream(std::istream& in) {
  LetorFile file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::string_view body = line;
    std::string_view comment;
    if (std::size_t hash = body.find('#'); hash != std::string_view::npos) {
      comment = body.substr(hash + 1);
      body = body.substr(0, hash);
    }
    auto parts = split_spaces(body);
    if (parts.empty()) {
      throw ParseError("empty example line", line_no);
    }
    if (parts.size() < 2) throw ParseError("missing qid column", line_no);

    FeatureVector fv;
    {
      int label = 0;
      auto [ptr, ec] = std::from_chars(parts[0].data(), parts[0].data() + parts[0].size(), label);
      if (ec != std::errc{} || ptr != parts[0].data() + parts[0].size()) {
        throw ParseError("invalid label '" + std::string(parts[0]) + "'", line_no);
      }
      if (label < kMinLabel || label > kMaxLabel) {
        throw ParseError("label " + std::to_string(label) + " outside 0..4", line_no);
      }
      fv.label = label;
    }
    if (!parts[1].starts_with("qid:")) throw ParseError("expected qid:<id>", line_no);
    {
      std::string_view qid_text = parts[1].substr(4);
      auto [ptr, ec] =
          std::from_chars(qid_text.data(), qid_text.data() + qid_text.size(), fv.qid);
      if (ec != std::errc{} || ptr != qid_text.data() + qid_text.size() || fv.qid < 0) {
        throw ParseError("invalid qid '" + std::string(qid_text) + "'", line_no);
      }
    }

    std::array<bool, kNumFeatures> seen{};
    for (std::size_t p = 2; p < parts.size(); ++p) {
      std::string_view pair = parts[p];
      const std::size_t colon = pair.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("expected <id>:<value>, got '" + std::string(pair) + "'", line_no);
      }
      int id = 0;
      {
        auto [ptr, ec] = std::from_chars(pair.data(), pair.data() + colon, id);
        if (ec != std::errc{} || ptr != pair.data() + colon) {
          throw ParseError("invalid feature id '" + std::string(pair) + "'", line_no);
        }
      }
      if (id < 1 || id > kNumFeatures) {
        throw ParseError("feature id " + std::to_string(id) + " outside 1..20", line_no);
      }
      if (seen[static_cast<std::size_t>(id - 1)]) {
        throw ParseError("duplicate feature id " + std::to_string(id), line_no);
      }
      seen[static_cast<std::size_t>(id - 1)] = true;
      double value = 0.0;
      {
        const char* begin = pair.data() + colon + 1;
        const char* end = pair.data() + pair.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
          throw ParseError("invalid feature value '" + std::string(pair) + "'", line_no);
        }
      }
      fv.set(id, value);
    }
    const auto missing =
        static_cast<int>(std::count(seen.begin(), seen.end(), false));
    if (missing > 0) {
      file.warnings.push_back("line " + std::to_string(line_no) + ": " + std::to_string(missing) +
                              " missing feature id(s) filled with 0");
    }

    // doc_id is the trimmed comment tail.
    std::size_t start = comment.find_first_not_of(' ');
    if (start != std::string_view::npos) {
      std::size_t stop = comment.find_last_not_of(" \t");
      fv.doc_id = std::string(comment.substr(start, stop - start + 1));
    }
    file.vectors.push_back(std::move(fv));
  }
  return file;
}

}  // namespace

LetorFile read_letor(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  return read_letor_stream(in);
}

LetorFile read_letor_text(const std::string& text) {
  std::istringstream in(text);
  return read_letor_stream(in);
}

NormalizationSpec NormalizationSpec::fit(const std::vector<FeatureVector>& train) {
  if (train.empty()) throw DataError("cannot fit normalization on an empty set");
  NormalizationSpec spec;
  spec.min = train.front().values;
  spec.max = train.front().values;
  for (const auto& fv : train) {
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      spec.min[i] = std::min(spec.min[i], fv.values[i]);
      spec.max[i] = std::max(spec.max[i], fv.values[i]);
    }
  }
  return spec;
}

double NormalizationSpec::apply_value(int id, double v) const {
  const auto i = static_cast<std::size_t>(id - 1);
  const double range = max[i] - min[i];
  if (range <= 0.0) return 0.0;
  return std::clamp((v - min[i]) / range, 0.0, 1.0);
}

void NormalizationSpec::apply(std::vector<FeatureVector>& vectors) const {
  for (auto& fv : vectors) {
    for (int id = 1; id <= kNumFeatures; ++id) {
      fv.set(id, apply_value(id, fv.get(id)));
    }
  }
}

void NormalizationSpec::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << "rankfuse-norm v1\n";
  for (int id = 1; id <= kNumFeatures; ++id) {
    const auto i = static_cast<std::size_t>(id - 1);
    out << id << ' ' << format_double(min[i]) << ' ' << format_double(max[i]) << '\n';
  }
  out << "end\n";
  if (!out) throw DataError("write failed: " + path);
}

NormalizationSpec NormalizationSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError("unexpected end of normalization file", line_no);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  next_line();
  if (line != "rankfuse-norm v1") {
    throw ParseError("bad normalization header '" + line + "'", line_no);
  }
  NormalizationSpec spec;
  for (int id = 1; id <= kNumFeatures; ++id) {
    next_line();
    std::istringstream ls(line);
    int got_id = 0;
    std::string min_text, max_text;
    if (!(ls >> got_id >> min_text >> max_text) || got_id != id) {
      throw ParseError("expected entry for feature " + std::to_string(id), line_no);
    }
    const auto i = static_cast<std::size_t>(id - 1);
    spec.min[i] = parse_double(min_text, line_no);
    spec.max[i] = parse_double(max_text, line_no);
  }
  next_line();
  if (line != "end") throw ParseError("missing end marker", line_no);
  return spec;
}

NormalizationSpec normalize_features(std::vector<FeatureVector>& train,
                                     std::vector<std::vector<FeatureVector>*> others) {
  NormalizationSpec spec = NormalizationSpec::fit(train);
  spec.apply(train);
  for (auto* set : others) {
    if (set) spec.apply(*set);
  }
  return spec;
}

}  // namespace rankfuse
