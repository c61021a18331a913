// SPDX-License-Identifier: Apache-2.0
//
// Shells the installed binary through the full pipeline on the bundled demo
// corpus and byte-compares every artifact against tests/golden. Set
// RANKFUSE_UPDATE_GOLDEN=1 to regenerate the golden files instead.
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "rankfuse/evaluate.hpp"
#include "rankfuse/letor.hpp"
#include "rankfuse/ranker.hpp"
#include "rankfuse/util.hpp"
#include "test_util.hpp"

#ifndef RANKFUSE_CLI_PATH
#error "RANKFUSE_CLI_PATH must name the CLI binary"
#endif
#ifndef RANKFUSE_DATA_DIR
#error "RANKFUSE_DATA_DIR must name the demo data directory"
#endif
#ifndef RANKFUSE_GOLDEN_DIR
#error "RANKFUSE_GOLDEN_DIR must name the golden directory"
#endif

using namespace rankfuse;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string out_path = test::tmp_path("cli_out_" + std::to_string(counter));
  const std::string err_path = test::tmp_path("cli_err_" + std::to_string(counter));
  ++counter;
  const std::string cmd =
      std::string(RANKFUSE_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult result;
  if (WIFEXITED(status)) result.code = WEXITSTATUS(status);
  result.out = test::read_file(out_path);
  result.err = test::read_file(err_path);
  return result;
}

bool update_golden() { return std::getenv("RANKFUSE_UPDATE_GOLDEN") != nullptr; }

void check_golden(const std::string& produced, const std::string& name) {
  const fs::path golden = fs::path(RANKFUSE_GOLDEN_DIR) / name;
  if (update_golden()) {
    fs::create_directories(golden.parent_path());
    fs::copy_file(produced, golden, fs::copy_options::overwrite_existing);
  }
  const std::string got = test::read_file(produced);
  const std::string want = test::read_file(golden.string());
  REQUIRE_MESSAGE(!got.empty(), "empty artifact: ", produced);
  const bool same = got == want;
  CHECK_MESSAGE(same, "artifact differs from tests/golden/", name);
}

std::string workdir() {
  const std::string dir = test::tmp_path("cli_work");
  fs::create_directories(dir);
  return dir;
}

std::string data_path(const std::string& name) {
  return (fs::path(RANKFUSE_DATA_DIR) / name).string();
}

}  // namespace

TEST_CASE("the pipeline reproduces the golden artifacts byte for byte") {
  const std::string w = workdir();
  const std::string config = w + "/config.json";
  {
    std::ofstream out(config);
    out << "{\"ca\": {\"restarts\": 2},\n"
           " \"lambdamart\": {\"num_trees\": 30, \"early_stopping_rounds\": 10}}\n";
  }
  const std::string base = "--config " + config + " ";

  RunResult r = run_cli(base + "prep --input " + data_path("annotations.tsv") +
                        " --test-queries " + data_path("test_queries.txt") + " --out-dir " + w +
                        "/prep");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.rfind("prep: train=", 0) == 0);
  check_golden(w + "/prep/train.tsv", "train.tsv");
  check_golden(w + "/prep/valid.tsv", "valid.tsv");
  check_golden(w + "/prep/stopwords.txt", "stopwords.txt");

  r = run_cli(base + "stats --input " + w + "/prep/train.tsv --out-dir " + w + "/stats");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  check_golden(w + "/stats/stats_title.txt", "stats_title.txt");
  check_golden(w + "/stats/stats_content.txt", "stats_content.txt");
  check_golden(w + "/stats/stats_title_content.txt", "stats_title_content.txt");

  r = run_cli(base + "features --input " + w + "/prep/train.tsv --stats-dir " + w +
              "/stats --stopwords " + w + "/prep/stopwords.txt --external " +
              data_path("external_train.tsv") + " --output " + w + "/train.letor");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  r = run_cli(base + "features --input " + w + "/prep/valid.tsv --stats-dir " + w +
              "/stats --stopwords " + w + "/prep/stopwords.txt --external " +
              data_path("external_valid.tsv") + " --bucket-source " + w +
              "/prep/train.tsv --output " + w + "/valid.letor");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  check_golden(w + "/train.letor", "train.letor");
  check_golden(w + "/valid.letor", "valid.letor");

  r = run_cli(base + "tune-bm25 --input " + w + "/prep/train.tsv --stats " + w +
              "/stats/stats_title_content.txt --report " + w +
              "/grid.tsv --k1-grid 1.2,1.6 --b-grid 0.4,0.87");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("best: k1=") != std::string::npos);
  check_golden(w + "/grid.tsv", "grid.tsv");

  r = run_cli(base + "train --train " + w + "/train.letor --valid " + w +
              "/valid.letor --algo ca --model-out " + w + "/ca.model");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.rfind("train ca: train_dcg=", 0) == 0);
  CHECK(r.out.find(" valid_dcg=") != std::string::npos);
  CHECK(r.out.find(" normalized=1") != std::string::npos);
  check_golden(w + "/ca.model", "ca.model");
  check_golden(w + "/ca.model.norm", "ca.model.norm");

  r = run_cli(base + "train --train " + w + "/train.letor --valid " + w +
              "/valid.letor --algo lambdamart --model-out " + w + "/lm.model");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.rfind("train lambdamart: trees=", 0) == 0);
  CHECK(r.out.find(" normalized=0") != std::string::npos);
  check_golden(w + "/lm.model", "lm.model");

  r = run_cli(base + "predict --model " + w + "/ca.model --input " + w + "/valid.letor --norm " +
              w + "/ca.model.norm --output " + w + "/run_ca.tsv");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  check_golden(w + "/run_ca.tsv", "run_ca.tsv");

  r = run_cli(base + "eval --model " + w + "/ca.model --input " + w + "/valid.letor --norm " + w +
              "/ca.model.norm --output " + w + "/eval_ca.tsv");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.rfind("eval: mean_dcg@10=", 0) == 0);
  check_golden(w + "/eval_ca.tsv", "eval_ca.tsv");

  r = run_cli(base + "eval --model " + w + "/lm.model --input " + w + "/valid.letor --output " +
              w + "/eval_lm.tsv");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  check_golden(w + "/eval_lm.tsv", "eval_lm.tsv");

  r = run_cli(base + "ablate --train " + w + "/train.letor --valid " + w +
              "/valid.letor --algo ca --output " + w + "/ablate_ca.tsv");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.rfind("ablate: baseline=", 0) == 0);
  check_golden(w + "/ablate_ca.tsv", "ablate_ca.tsv");

  // The eval artifact must agree with an in-process rerun of the same model.
  const Ranker model = load_model(w + "/ca.model");
  LetorFile valid = read_letor(w + "/valid.letor");
  NormalizationSpec::load(w + "/ca.model.norm").apply(valid.vectors);
  const EvalReport report = evaluate(model, GroupedVectors::from(std::move(valid.vectors)));
  const std::string eval_text = test::read_file(w + "/eval_ca.tsv");
  CHECK(eval_text.find("mean\t" + format_double(report.mean_dcg) + "\tqueries=") !=
        std::string::npos);
}

TEST_CASE("training is byte-identical across reruns and thread counts") {
  const std::string w = workdir();
  REQUIRE(fs::exists(w + "/train.letor"));  // produced by the pipeline case

  auto train_to = [&](const std::string& name, const std::string& extra) {
    const RunResult r = run_cli("train --train " + w + "/train.letor --valid " + w +
                                "/valid.letor --algo ca --model-out " + w + "/" + name + extra);
    REQUIRE_MESSAGE(r.code == 0, r.err);
  };
  train_to("ca_a.model", "");
  train_to("ca_b.model", "");
  train_to("ca_t3.model", " --threads 3");
  CHECK(test::read_file(w + "/ca_a.model") == test::read_file(w + "/ca_b.model"));
  CHECK(test::read_file(w + "/ca_a.model") == test::read_file(w + "/ca_t3.model"));

  const RunResult lm1 = run_cli("train --train " + w + "/train.letor --algo lambdamart" +
                                " --model-out " + w + "/lm_a.model --threads 3");
  const RunResult lm2 = run_cli("train --train " + w + "/train.letor --algo lambdamart" +
                                " --model-out " + w + "/lm_b.model --threads 1");
  REQUIRE(lm1.code == 0);
  REQUIRE(lm2.code == 0);
  CHECK(test::read_file(w + "/lm_a.model") == test::read_file(w + "/lm_b.model"));
}

TEST_CASE("usage problems exit with code 1") {
  CHECK(run_cli("").code == 1);
  CHECK(run_cli("frobnicate").code == 1);
  CHECK(run_cli("prep --out-dir /tmp/x").code == 1);  // missing required --input
  const RunResult r = run_cli("train --train a --algo ca");  // missing --model-out
  CHECK(r.code == 1);
  CHECK(r.err.find("usage error:") != std::string::npos);
}

TEST_CASE("data problems exit with code 2") {
  const RunResult missing =
      run_cli("prep --input /nonexistent/annotations.tsv --out-dir " + test::tmp_path("p"));
  CHECK(missing.code == 2);
  CHECK(missing.err.find("data error:") != std::string::npos);

  const RunResult bad_algo =
      run_cli("train --train nope.letor --algo bogus --model-out " + test::tmp_path("m"));
  CHECK(bad_algo.code == 2);
  CHECK(bad_algo.err.find("unknown algorithm") != std::string::npos);

  const std::string bad_config = test::tmp_path("bad_config.json");
  {
    std::ofstream out(bad_config);
    out << "{not json";
  }
  CHECK(run_cli("--config " + bad_config + " stats --input x --out-dir y").code == 2);
  CHECK(run_cli("--config /nonexistent.json stats --input x --out-dir y").code == 2);
}

TEST_CASE("gain and cutoff flags reach the evaluation report") {
  const std::string w = workdir();
  std::vector<FeatureVector> rows(2);
  rows[0].qid = 0;
  rows[0].doc_id = "dA";
  rows[0].label = 2;
  rows[0].set(1, 1.0);
  rows[1].qid = 0;
  rows[1].doc_id = "dB";
  rows[1].label = 0;
  rows[1].set(1, 0.5);
  write_letor(rows, w + "/tiny.letor");
  LinearRanker linear;
  linear.weights.fill(0.0);
  linear.weights[0] = 1.0;
  save_model(Ranker{linear}, w + "/tiny.model");

  RunResult r = run_cli("--gain linear eval --model " + w + "/tiny.model --input " + w +
                        "/tiny.letor --output " + w + "/tiny_eval.tsv");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(test::read_file(w + "/tiny_eval.tsv").rfind("# dcg@10 gain=linear\n", 0) == 0);
  CHECK(r.out.find("gain=linear") != std::string::npos);

  const std::string config = w + "/cutoff.json";
  {
    std::ofstream out(config);
    out << "{\"dcg_cutoff\": 5}\n";
  }
  r = run_cli("--config " + config + " eval --model " + w + "/tiny.model --input " + w +
              "/tiny.letor --output " + w + "/tiny_eval5.tsv");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(test::read_file(w + "/tiny_eval5.tsv").rfind("# dcg@5 gain=exponential\n", 0) == 0);
}
