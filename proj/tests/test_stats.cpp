// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <fstream>
#include <utility>
#include <vector>

#include "doctest.h"
#include "rankfuse/corpus.hpp"
#include "rankfuse/stats.hpp"
#include "test_util.hpp"

using namespace rankfuse;

namespace {

std::vector<std::pair<Token, std::uint64_t>> entries(const TokenStatMap& m) {
  std::vector<std::pair<Token, std::uint64_t>> out;
  m.for_each_sorted([&out](Token t, std::uint64_t c) { out.emplace_back(t, c); });
  return out;
}

void check_equal(const CollectionStats& a, const CollectionStats& b) {
  CHECK(a.field == b.field);
  CHECK(a.num_docs == b.num_docs);
  CHECK(a.total_tokens == b.total_tokens);
  CHECK(a.avgdl == b.avgdl);
  CHECK(entries(a.df) == entries(b.df));
  CHECK(entries(a.cf) == entries(b.cf));
}

}  // namespace

TEST_CASE("build_stats hand-counted example") {
  // Two documents with content [1,2] and [2,2].
  const Dataset d = parse_dataset_text(
      "0\t1\t\t1 2\t0\t-\n"
      "0\t1\t\t2 2\t0\t-\n");
  const CollectionStats s = build_stats(d, Field::kContent);
  CHECK(s.num_docs == 2);
  CHECK(s.df.get(1) == 1);
  CHECK(s.df.get(2) == 2);
  CHECK(s.cf.get(1) == 1);
  CHECK(s.cf.get(2) == 3);
  CHECK(s.total_tokens == 4);
  CHECK(s.avgdl == 2.0);
  CHECK(s.df.get(99) == 0);
}

TEST_CASE("build_stats counts each doc_id once") {
  Dataset d = parse_dataset_text(
      "0\t1\t\t1 2\t0\t-\n"
      "1\t2\t\t1 2\t0\t-\n");
  d.examples[1].document.doc_id = d.examples[0].document.doc_id;
  const CollectionStats s = build_stats(d, Field::kContent);
  CHECK(s.num_docs == 1);
  CHECK(s.df.get(1) == 1);
  CHECK(s.cf.get(1) == 1);
}

TEST_CASE("build_stats degenerate collections") {
  const CollectionStats empty = build_stats(Dataset{}, Field::kTitleContent);
  CHECK(empty.num_docs == 0);
  CHECK(empty.avgdl == 0.0);

  const Dataset d = parse_dataset_text("0\t1\t\t\t0\t-\n");
  const CollectionStats one = build_stats(d, Field::kTitleContent);
  CHECK(one.num_docs == 1);
  CHECK(one.total_tokens == 0);
  CHECK(one.avgdl == 0.0);
}

TEST_CASE("build_stats title_content concatenates the fields") {
  const Dataset d = parse_dataset_text("0\t1\t3 4\t4 5\t0\t-\n");
  const CollectionStats s = build_stats(d, Field::kTitleContent);
  CHECK(s.total_tokens == 4);
  CHECK(s.df.get(4) == 1);
  CHECK(s.cf.get(4) == 2);

  const Document& doc = d.examples[0].document;
  CHECK(field_tokens(doc, Field::kTitle) == TokenSeq{3, 4});
  CHECK(field_tokens(doc, Field::kContent) == TokenSeq{4, 5});
  CHECK(field_tokens(doc, Field::kTitleContent) == TokenSeq{3, 4, 4, 5});
}

TEST_CASE("build_stats parallel equals serial exactly") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Dataset d = test::make_random_dataset(seed);
    for (Field field : {Field::kTitle, Field::kContent, Field::kTitleContent}) {
      check_equal(build_stats(d, field), build_stats_serial(d, field));
    }
  }
}

TEST_CASE("TokenStatMap picks dense or sparse without changing lookups") {
  // Packed vocabulary finalizes dense.
  TokenStatMap packed;
  for (Token t = 0; t < 64; ++t) packed.add(t, t + 1);
  packed.finalize();
  CHECK(packed.is_dense());
  CHECK(packed.get(10) == 11);
  CHECK(packed.distinct() == 64);

  // A lone huge token id stays sparse.
  TokenStatMap scattered;
  scattered.add(5, 2);
  scattered.add(1u << 30, 7);
  scattered.finalize();
  CHECK_FALSE(scattered.is_dense());
  CHECK(scattered.get(5) == 2);
  CHECK(scattered.get(1u << 30) == 7);
  CHECK(scattered.get(6) == 0);
  CHECK(scattered.distinct() == 2);
}

TEST_CASE("stats persistence round-trips losslessly") {
  for (std::uint64_t seed = 40; seed < 48; ++seed) {
    const Dataset d = test::make_random_dataset(seed);
    const CollectionStats s = build_stats(d, Field::kTitleContent);
    const std::string path = test::tmp_path("stats_" + std::to_string(seed) + ".txt");
    save_stats(s, path);
    check_equal(load_stats(path), s);
  }
}

TEST_CASE("load_stats rejects malformed files") {
  const std::string bad_header = test::tmp_path("stats_bad_header.txt");
  {
    std::ofstream out(bad_header);
    out << "something-else v9\n";
  }
  CHECK_THROWS_AS(load_stats(bad_header), DataError);

  const std::string truncated = test::tmp_path("stats_truncated.txt");
  {
    std::ofstream out(truncated);
    out << "rankfuse-stats v1\nfield title\nnum_docs 1\ntotal_tokens 2\n1 1 2\n";
  }
  CHECK_THROWS_AS(load_stats(truncated), DataError);
  CHECK_THROWS_AS(load_stats(test::tmp_path("missing_stats.txt")), DataError);
}

TEST_CASE("field names parse back") {
  for (Field f : {Field::kTitle, Field::kContent, Field::kTitleContent}) {
    CHECK(parse_field(field_name(f)) == f);
  }
  CHECK_THROWS_AS(parse_field("body"), DataError);
}
