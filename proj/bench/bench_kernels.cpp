// SPDX-License-Identifier: Apache-2.0
//
// Serial-vs-OpenMP comparison for every parallel kernel. Both variants are
// bit-identical by contract (see the tests); this target measures them.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rankfuse/corpus.hpp"
#include "rankfuse/dcg.hpp"
#include "rankfuse/features.hpp"
#include "rankfuse/parallel.hpp"
#include "rankfuse/ranker.hpp"
#include "rankfuse/rng.hpp"
#include "rankfuse/stats.hpp"
#include "rankfuse/synth.hpp"
#include "rankfuse/trainers.hpp"
#include "rankfuse/tree_fit.hpp"

using namespace rankfuse;

namespace {

struct Fixture {
  Dataset corpus;
  StatsBundle bundle;
  StopwordSet stopwords;
  FreqBucketizer bucketizer;
  ScoreParams params;
  ExternalScores external;

  GroupedVectors grouped;
  GroupedLabels labels;
  std::vector<double> scores;
  std::vector<double> lambdas;
  std::vector<double> hessians;
  Ranker ensemble{TreeEnsemble{}};

  static const Fixture& get() {
    static const Fixture f;
    return f;
  }

 private:
  Fixture() {
    LexicalSynthConfig config;
    config.num_queries = 80;
    config.docs_per_query = 8;
    config.vocab_size = 500;
    config.seed = 2;
    corpus = synth_lexical_corpus(config).dataset;
    bundle = {build_stats(corpus, Field::kTitle), build_stats(corpus, Field::kContent),
              build_stats(corpus, Field::kTitleContent)};
    stopwords = extract_stopwords(corpus, 50);
    std::vector<Query> queries;
    for (const auto& ex : corpus.examples) {
      if (queries.empty() || queries.back().qid != ex.query.qid) queries.push_back(ex.query);
    }
    bucketizer = FreqBucketizer::fit(queries);

    grouped = GroupedVectors::from(synth_single_informative(300, 10, 6, 1));
    labels = grouped.labels();
    std::mt19937_64 rng(mix_seed(1, 0xbe));
    scores.resize(grouped.rows.size());
    for (auto& s : scores) s = uniform01(rng) * 4.0 - 2.0;
    lambdas.resize(scores.size());
    hessians.resize(scores.size());
    compute_lambdas_serial(grouped, scores, 1.0, 10, Gain::kExponential, lambdas, hessians);

    TrainConfig tc;
    tc.lm.num_trees = 20;
    ensemble = Ranker{train_lambdamart(grouped, nullptr, tc).model};
  }
};

void bm_mean_dcg_parallel(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mean_dcg_grouped(f.labels, f.scores, 10, Gain::kExponential));
  }
}

void bm_mean_dcg_serial(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mean_dcg_grouped_serial(f.labels, f.scores, 10, Gain::kExponential));
  }
}

void bm_build_stats_parallel(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_stats(f.corpus, Field::kTitleContent));
  }
}

void bm_build_stats_serial(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_stats_serial(f.corpus, Field::kTitleContent));
  }
}

void bm_extract_batch_parallel(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        extract_batch(f.corpus, f.bundle, f.stopwords, f.external, f.bucketizer, f.params));
  }
}

void bm_extract_batch_serial(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        extract_batch_serial(f.corpus, f.bundle, f.stopwords, f.external, f.bucketizer, f.params));
  }
}

void bm_compute_lambdas_parallel(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  std::vector<double> lambdas(f.scores.size()), hessians(f.scores.size());
  for (auto _ : state) {
    compute_lambdas(f.grouped, f.scores, 1.0, 10, Gain::kExponential, lambdas, hessians);
    benchmark::DoNotOptimize(lambdas.data());
  }
}

void bm_compute_lambdas_serial(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  std::vector<double> lambdas(f.scores.size()), hessians(f.scores.size());
  for (auto _ : state) {
    compute_lambdas_serial(f.grouped, f.scores, 1.0, 10, Gain::kExponential, lambdas, hessians);
    benchmark::DoNotOptimize(lambdas.data());
  }
}

void bm_fit_tree_parallel(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  const TreeFitParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fit_regression_tree(f.grouped.rows, f.lambdas, f.hessians, params, FeatureMask::all()));
  }
}

void bm_fit_tree_serial(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  const TreeFitParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_regression_tree_serial(f.grouped.rows, f.lambdas, f.hessians,
                                                        params, FeatureMask::all()));
  }
}

void bm_score_all_parallel(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_all(f.ensemble, f.grouped));
  }
}

void bm_score_all_serial(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_all_serial(f.ensemble, f.grouped));
  }
}

BENCHMARK(bm_mean_dcg_serial);
BENCHMARK(bm_mean_dcg_parallel);
BENCHMARK(bm_build_stats_serial);
BENCHMARK(bm_build_stats_parallel);
BENCHMARK(bm_extract_batch_serial);
BENCHMARK(bm_extract_batch_parallel);
BENCHMARK(bm_compute_lambdas_serial);
BENCHMARK(bm_compute_lambdas_parallel);
BENCHMARK(bm_fit_tree_serial);
BENCHMARK(bm_fit_tree_parallel);
BENCHMARK(bm_score_all_serial);
BENCHMARK(bm_score_all_parallel);

}  // namespace

int main(int argc, char** argv) {
  parallel::set_max_threads(0);  // the runtime's hardware default
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
