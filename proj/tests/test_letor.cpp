// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "rankfuse/letor.hpp"
#include "rankfuse/rng.hpp"
#include "test_util.hpp"

using namespace rankfuse;

namespace {

std::vector<FeatureVector> make_random_vectors(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(mix_seed(seed, 0x1e70));
  std::vector<FeatureVector> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].qid = static_cast<std::int64_t>(uniform_below(rng, 5));
    out[i].doc_id = "d" + std::to_string(uniform_below(rng, 1000));
    out[i].label = static_cast<int>(uniform_below(rng, 5));
    for (int id = 1; id <= kNumFeatures; ++id) {
      // Awkward magnitudes stress the shortest-round-trip rendering.
      out[i].set(id, (uniform01(rng) - 0.5) * std::pow(10.0, uniform01(rng) * 12.0 - 6.0));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("letor_line renders label, qid, all ids and the doc comment") {
  FeatureVector fv;
  fv.qid = 7;
  fv.doc_id = "d9";
  fv.label = 3;
  fv.set(1, 0.5);
  fv.set(20, -2.0);
  const std::string line = letor_line(fv);
  CHECK(line.starts_with("3 qid:7 1:0.5 2:0 "));
  CHECK(line.find(" 20:-2 # d9") == line.size() - 11);
}

TEST_CASE("letor write/read round-trips the doubles exactly") {
  const auto vectors = make_random_vectors(1, 40);
  const std::string path = test::tmp_path("roundtrip.letor");
  write_letor(vectors, path);
  const LetorFile file = read_letor(path);
  CHECK(file.warnings.empty());
  REQUIRE(file.vectors.size() == vectors.size());

  // The writer orders by (qid, doc_id); mirror that to compare.
  std::vector<const FeatureVector*> want;
  for (const auto& fv : vectors) want.push_back(&fv);
  std::stable_sort(want.begin(), want.end(), [](const FeatureVector* a, const FeatureVector* b) {
    return a->qid != b->qid ? a->qid < b->qid : a->doc_id < b->doc_id;
  });
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(file.vectors[i].qid == want[i]->qid);
    CHECK(file.vectors[i].doc_id == want[i]->doc_id);
    CHECK(file.vectors[i].label == want[i]->label);
    CHECK(file.vectors[i].values == want[i]->values);  // bit-exact
  }
}

TEST_CASE("read_letor fills missing feature ids with zero and warns") {
  const LetorFile file = read_letor_text("2 qid:3 1:0.5 7:1.25 # dA\n");
  REQUIRE(file.vectors.size() == 1);
  CHECK(file.vectors[0].get(1) == 0.5);
  CHECK(file.vectors[0].get(7) == 1.25);
  CHECK(file.vectors[0].get(2) == 0.0);
  CHECK(file.vectors[0].get(20) == 0.0);
  CHECK(file.vectors[0].doc_id == "dA");
  REQUIRE(file.warnings.size() == 1);
  CHECK(file.warnings[0].find("18 missing") != std::string::npos);
}

TEST_CASE("read_letor tolerates a missing comment and extra comment text") {
  const LetorFile file = read_letor_text(
      "0 qid:0 1:1 # dZ   trailing words  \n"
      "0 qid:0 1:1\n");
  REQUIRE(file.vectors.size() == 2);
  CHECK(file.vectors[0].doc_id == "dZ   trailing words");
  CHECK(file.vectors[1].doc_id.empty());
}

TEST_CASE("read_letor rejects malformed lines") {
  CHECK_THROWS_AS(read_letor_text("2 qid:3 1:0.5 1:0.7 # d\n"), ParseError);  // duplicate id
  CHECK_THROWS_AS(read_letor_text("5 qid:3 1:0.5\n"), ParseError);            // label range
  CHECK_THROWS_AS(read_letor_text("x qid:3 1:0.5\n"), ParseError);            // label syntax
  CHECK_THROWS_AS(read_letor_text("2 3 1:0.5\n"), ParseError);                // missing qid:
  CHECK_THROWS_AS(read_letor_text("2 qid:-1 1:0.5\n"), ParseError);           // negative qid
  CHECK_THROWS_AS(read_letor_text("2 qid:3 21:0.5\n"), ParseError);           // id range
  CHECK_THROWS_AS(read_letor_text("2 qid:3 1:nan\n"), ParseError);            // non-finite
  CHECK_THROWS_AS(read_letor_text("2 qid:3 1\n"), ParseError);                // missing colon
  CHECK_THROWS_AS(read_letor_text("2\n"), ParseError);                        // qid column
  CHECK_THROWS_AS(read_letor("/nonexistent/path.letor"), DataError);
  try {
    read_letor_text("0 qid:0 1:1 # d\n0 qid:0 1:1 1:2 # d\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line_number == 2);
  }
}

TEST_CASE("normalization maps the fitted set into the unit interval") {
  auto vectors = make_random_vectors(2, 60);
  const NormalizationSpec spec = NormalizationSpec::fit(vectors);
  auto scaled = vectors;
  spec.apply(scaled);
  for (const auto& fv : scaled) {
    for (double v : fv.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  // Scaling is affine per feature, so within-feature order is preserved.
  for (int id = 1; id <= kNumFeatures; ++id) {
    for (std::size_t i = 1; i < vectors.size(); ++i) {
      const bool raw_less = vectors[i - 1].get(id) < vectors[i].get(id);
      const bool scaled_le = scaled[i - 1].get(id) <= scaled[i].get(id);
      if (raw_less) CHECK(scaled_le);
    }
  }
}

TEST_CASE("normalization zeroes constant features and clamps out-of-range values") {
  std::vector<FeatureVector> train(3);
  for (std::size_t i = 0; i < train.size(); ++i) {
    train[i].set(1, 5.0);                          // constant
    train[i].set(2, static_cast<double>(i));       // range [0, 2]
  }
  const NormalizationSpec spec = NormalizationSpec::fit(train);
  CHECK(spec.apply_value(1, 5.0) == 0.0);
  CHECK(spec.apply_value(2, 1.0) == 0.5);
  CHECK(spec.apply_value(2, -10.0) == 0.0);
  CHECK(spec.apply_value(2, 10.0) == 1.0);
}

TEST_CASE("normalize_features scales other sets with the training spec") {
  auto train = make_random_vectors(3, 30);
  auto valid = make_random_vectors(4, 10);
  auto valid_copy = valid;
  const NormalizationSpec spec = normalize_features(train, {&valid});
  for (std::size_t i = 0; i < valid.size(); ++i) {
    for (int id = 1; id <= kNumFeatures; ++id) {
      CHECK(valid[i].get(id) == spec.apply_value(id, valid_copy[i].get(id)));
    }
  }
}

TEST_CASE("normalization spec persistence round-trips") {
  const auto vectors = make_random_vectors(5, 20);
  const NormalizationSpec spec = NormalizationSpec::fit(vectors);
  const std::string path = test::tmp_path("spec.norm");
  spec.save(path);
  const NormalizationSpec back = NormalizationSpec::load(path);
  CHECK(back.min == spec.min);
  CHECK(back.max == spec.max);

  CHECK_THROWS_AS(NormalizationSpec::load(test::tmp_path("missing.norm")), DataError);
  const std::string bad = test::tmp_path("bad.norm");
  {
    std::ofstream out(bad);
    out << "rankfuse-norm v1\n1 0 1\n";
  }
  CHECK_THROWS_AS(NormalizationSpec::load(bad), ParseError);
}

TEST_CASE("normalization fit rejects an empty set") {
  CHECK_THROWS_AS(NormalizationSpec::fit({}), DataError);
}
