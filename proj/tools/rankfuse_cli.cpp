// SPDX-License-Identifier: Apache-2.0
//
// Batch front end for the ranking pipeline. Numeric settings live in a JSON
// config file; command-line flags override it and the effective config is
// archived next to each run's outputs.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankfuse/corpus.hpp"
#include "rankfuse/evaluate.hpp"
#include "rankfuse/features.hpp"
#include "rankfuse/grid_search.hpp"
#include "rankfuse/letor.hpp"
#include "rankfuse/parallel.hpp"
#include "rankfuse/ranker.hpp"
#include "rankfuse/stats.hpp"
#include "rankfuse/trainers.hpp"
#include "rankfuse/util.hpp"

namespace rf = rankfuse;
using nlohmann::json;

namespace {

struct PipelineConfig {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string gain = "exponential";
  std::size_t dcg_cutoff = 10;
  double bm25_k1 = 1.6;
  double bm25_b = 0.87;
  double qld_mu = 2000.0;
  std::size_t stopword_k = 50;
  double split_fraction = 0.2;
  std::string freq_buckets = "quantile";
  rf::CaParams ca;
  rf::LmParams lm;
  std::vector<double> grid_k1 = {0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
  std::vector<double> grid_b = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::string normalize = "auto";  // auto: on for ca, off for lambdamart
};

json config_to_json(const PipelineConfig& c) {
  return json{
      {"seed", c.seed},
      {"threads", c.threads},
      {"gain", c.gain},
      {"dcg_cutoff", c.dcg_cutoff},
      {"bm25", {{"k1", c.bm25_k1}, {"b", c.bm25_b}}},
      {"qld", {{"mu", c.qld_mu}}},
      {"stopwords", {{"k", c.stopword_k}}},
      {"split", {{"fraction", c.split_fraction}}},
      {"freq_buckets", c.freq_buckets},
      {"normalize", c.normalize},
      {"ca",
       {{"restarts", c.ca.restarts},
        {"tolerance", c.ca.tolerance},
        {"max_passes", c.ca.max_passes}}},
      {"lambdamart",
       {{"num_trees", c.lm.num_trees},
        {"max_leaves", c.lm.max_leaves},
        {"learning_rate", c.lm.learning_rate},
        {"min_leaf_instances", c.lm.min_leaf_instances},
        {"sigma", c.lm.sigma},
        {"early_stopping_rounds", c.lm.early_stopping_rounds}}},
      {"grid", {{"k1", c.grid_k1}, {"b", c.grid_b}}},
  };
}

void config_from_json(const json& j, PipelineConfig& c) {
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.gain = j.value("gain", c.gain);
  c.dcg_cutoff = j.value("dcg_cutoff", c.dcg_cutoff);
  c.freq_buckets = j.value("freq_buckets", c.freq_buckets);
  c.normalize = j.value("normalize", c.normalize);
  if (auto it = j.find("bm25"); it != j.end()) {
    c.bm25_k1 = it->value("k1", c.bm25_k1);
    c.bm25_b = it->value("b", c.bm25_b);
  }
  if (auto it = j.find("qld"); it != j.end()) c.qld_mu = it->value("mu", c.qld_mu);
  if (auto it = j.find("stopwords"); it != j.end()) c.stopword_k = it->value("k", c.stopword_k);
  if (auto it = j.find("split"); it != j.end()) {
    c.split_fraction = it->value("fraction", c.split_fraction);
  }
  if (auto it = j.find("ca"); it != j.end()) {
    c.ca.restarts = it->value("restarts", c.ca.restarts);
    c.ca.tolerance = it->value("tolerance", c.ca.tolerance);
    c.ca.max_passes = it->value("max_passes", c.ca.max_passes);
  }
  if (auto it = j.find("lambdamart"); it != j.end()) {
    c.lm.num_trees = it->value("num_trees", c.lm.num_trees);
    c.lm.max_leaves = it->value("max_leaves", c.lm.max_leaves);
    c.lm.learning_rate = it->value("learning_rate", c.lm.learning_rate);
    c.lm.min_leaf_instances = it->value("min_leaf_instances", c.lm.min_leaf_instances);
    c.lm.sigma = it->value("sigma", c.lm.sigma);
    c.lm.early_stopping_rounds = it->value("early_stopping_rounds", c.lm.early_stopping_rounds);
  }
  if (auto it = j.find("grid"); it != j.end()) {
    c.grid_k1 = it->value("k1", c.grid_k1);
    c.grid_b = it->value("b", c.grid_b);
  }
}

void archive_config(const PipelineConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw rf::DataError("cannot write file: " + path);
  out << config_to_json(c).dump(2) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw rf::DataError("cannot write file: " + path);
  out << text;
  if (!out) throw rf::DataError("write failed: " + path);
}

rf::TrainConfig train_config(const PipelineConfig& c) {
  rf::TrainConfig tc;
  tc.ca = c.ca;
  tc.lm = c.lm;
  tc.seed = c.seed;
  tc.dcg_cutoff = c.dcg_cutoff;
  tc.gain = rf::parse_gain(c.gain);
  return tc;
}

bool resolve_normalize(const PipelineConfig& c, rf::Algo algo) {
  if (c.normalize == "on") return true;
  if (c.normalize == "off") return false;
  if (c.normalize == "auto") return algo == rf::Algo::kCoordinateAscent;
  throw rf::DataError("normalize must be auto, on or off, got '" + c.normalize + "'");
}

// Distinct qids in first-appearance order, for frequency-bucket fitting.
std::vector<rf::Query> distinct_queries(const rf::Dataset& dataset) {
  std::vector<rf::Query> out;
  std::vector<std::int64_t> seen;
  for (const auto& ex : dataset.examples) {
    if (std::find(seen.begin(), seen.end(), ex.query.qid) == seen.end()) {
      seen.push_back(ex.query.qid);
      out.push_back(ex.query);
    }
  }
  return out;
}

struct PrepArgs {
  std::string input, test_queries, out_dir;
};

int run_prep(const PipelineConfig& cfg, const PrepArgs& args) {
  std::filesystem::create_directories(args.out_dir);
  rf::Dataset dataset = rf::remap_qids(rf::parse_dataset(args.input));
  std::vector<rf::Query> test;
  if (!args.test_queries.empty()) test = rf::parse_query_file(args.test_queries);
  rf::SplitResult split = rf::split_by_similarity(dataset, test, cfg.split_fraction);
  rf::StopwordSet stopwords = rf::extract_stopwords(split.train, cfg.stopword_k);

  const std::filesystem::path dir(args.out_dir);
  rf::write_dataset(split.train, (dir / "train.tsv").string());
  rf::write_dataset(split.valid, (dir / "valid.tsv").string());
  rf::save_stopwords(stopwords, (dir / "stopwords.txt").string());
  archive_config(cfg, (dir / "config.json").string());
  std::cout << "prep: train=" << split.train.examples.size()
            << " valid=" << split.valid.examples.size() << " stopwords=" << stopwords.size()
            << (split.fallback_used ? " split=last-by-qid" : " split=similarity") << '\n';
  return 0;
}

struct StatsArgs {
  std::string input, out_dir;
};

int run_stats(const PipelineConfig& cfg, const StatsArgs& args) {
  std::filesystem::create_directories(args.out_dir);
  const rf::Dataset dataset = rf::parse_dataset(args.input);
  const std::filesystem::path dir(args.out_dir);
  for (rf::Field field : {rf::Field::kTitle, rf::Field::kContent, rf::Field::kTitleContent}) {
    const rf::CollectionStats stats = rf::build_stats(dataset, field);
    const std::string name = "stats_" + rf::field_name(field) + ".txt";
    rf::save_stats(stats, (dir / name).string());
    std::cout << "stats " << rf::field_name(field) << ": docs=" << stats.num_docs
              << " tokens=" << stats.total_tokens << " avgdl=" << rf::format_double(stats.avgdl)
              << '\n';
  }
  archive_config(cfg, (dir / "config.json").string());
  return 0;
}

struct FeaturesArgs {
  std::string input, stats_dir, stopwords, external, bucket_source, output;
};

int run_features(const PipelineConfig& cfg, const FeaturesArgs& args) {
  const rf::Dataset dataset = rf::parse_dataset(args.input);
  const std::filesystem::path dir(args.stats_dir);
  rf::StatsBundle bundle{
      rf::load_stats((dir / "stats_title.txt").string()),
      rf::load_stats((dir / "stats_content.txt").string()),
      rf::load_stats((dir / "stats_title_content.txt").string()),
  };
  const rf::StopwordSet stopwords = rf::load_stopwords(args.stopwords);
  rf::ExternalScores external;
  if (!args.external.empty()) external = rf::ExternalScores::load(args.external);

  const std::string bucket_path = args.bucket_source.empty() ? args.input : args.bucket_source;
  const rf::Dataset bucket_set =
      bucket_path == args.input ? dataset : rf::parse_dataset(bucket_path);
  const auto mode = [&] {
    if (cfg.freq_buckets == "quantile") return rf::FreqBucketizer::Mode::kQuantile;
    if (cfg.freq_buckets == "equal_width") return rf::FreqBucketizer::Mode::kEqualWidth;
    throw rf::DataError("freq_buckets must be quantile or equal_width, got '" +
                        cfg.freq_buckets + "'");
  }();
  const rf::FreqBucketizer bucketizer =
      rf::FreqBucketizer::fit(distinct_queries(bucket_set), mode);

  const rf::ScoreParams params{{cfg.bm25_k1, cfg.bm25_b}, {cfg.qld_mu}};
  const std::vector<rf::FeatureVector> vectors =
      rf::extract_batch(dataset, bundle, stopwords, external, bucketizer, params);
  rf::write_letor(vectors, args.output);
  archive_config(cfg, args.output + ".config.json");
  std::cout << "features: examples=" << vectors.size() << " -> " << args.output << '\n';
  return 0;
}

struct TuneArgs {
  std::string input, stats, report;
};

int run_tune(const PipelineConfig& cfg, const TuneArgs& args) {
  const rf::Dataset dataset = rf::parse_dataset(args.input);
  const rf::CollectionStats stats = rf::load_stats(args.stats);
  const rf::GridSearchResult result = rf::grid_search_bm25_full(
      dataset, stats, cfg.grid_k1, cfg.grid_b, cfg.dcg_cutoff, rf::parse_gain(cfg.gain));

  std::string table = "k1\tb\tmean_dcg\n";
  for (const rf::GridCell& cell : result.cells) {
    table += rf::format_double(cell.k1) + "\t" + rf::format_double(cell.b) + "\t" +
             rf::format_double(cell.mean_dcg) + "\n";
  }
  if (result.degenerate) {
    std::cerr << "warning: all labels equal, every grid cell ties; tie rule picked the result\n";
  }
  std::cout << table;
  std::cout << "best: k1=" << rf::format_double(result.best.k1)
            << " b=" << rf::format_double(result.best.b) << '\n';
  if (!args.report.empty()) {
    write_text(args.report, table);
    archive_config(cfg, args.report + ".config.json");
  }
  return 0;
}

struct TrainArgs {
  std::string train, valid, algo, model_out, norm_out;
};

int run_train(const PipelineConfig& cfg, const TrainArgs& args) {
  const rf::Algo algo = rf::parse_algo(args.algo);
  rf::LetorFile train_file = rf::read_letor(args.train);
  std::optional<rf::LetorFile> valid_file;
  if (!args.valid.empty()) valid_file = rf::read_letor(args.valid);
  for (const auto& w : train_file.warnings) std::cerr << "warning: " << args.train << ": " << w << '\n';
  if (valid_file) {
    for (const auto& w : valid_file->warnings) {
      std::cerr << "warning: " << args.valid << ": " << w << '\n';
    }
  }

  const bool normalize = resolve_normalize(cfg, algo);
  const std::string norm_path = args.norm_out.empty() ? args.model_out + ".norm" : args.norm_out;
  rf::NormalizationSpec spec = rf::NormalizationSpec::fit(train_file.vectors);
  if (normalize) {
    spec.apply(train_file.vectors);
    if (valid_file) spec.apply(valid_file->vectors);
  }
  spec.save(norm_path);

  const rf::GroupedVectors train_set = rf::GroupedVectors::from(std::move(train_file.vectors));
  std::optional<rf::GroupedVectors> valid_set;
  if (valid_file) valid_set = rf::GroupedVectors::from(std::move(valid_file->vectors));
  const rf::GroupedVectors* valid_ptr = valid_set ? &*valid_set : nullptr;

  const rf::TrainConfig tc = train_config(cfg);
  if (algo == rf::Algo::kCoordinateAscent) {
    const rf::CaResult result = rf::train_coordinate_ascent(train_set, valid_ptr, tc);
    rf::save_model(result.model, args.model_out);
    std::cout << "train ca: train_dcg=" << rf::format_double(result.train_dcg);
    if (result.valid_dcg) std::cout << " valid_dcg=" << rf::format_double(*result.valid_dcg);
    std::cout << " restart=" << result.best_restart << " steps="
              << result.objective_trace.size() - 1 << " normalized=" << (normalize ? "1" : "0")
              << '\n';
  } else {
    const rf::LmResult result = rf::train_lambdamart(train_set, valid_ptr, tc);
    rf::save_model(result.model, args.model_out);
    std::cout << "train lambdamart: trees=" << result.model.trees.size()
              << " train_dcg=" << rf::format_double(result.train_dcg[result.best_round]);
    if (!result.valid_dcg.empty()) {
      std::cout << " valid_dcg=" << rf::format_double(result.valid_dcg[result.best_round]);
    }
    std::cout << " normalized=" << (normalize ? "1" : "0") << '\n';
  }
  archive_config(cfg, args.model_out + ".config.json");
  return 0;
}

struct PredictArgs {
  std::string model, input, norm, output;
};

rf::GroupedVectors load_grouped(const std::string& path, const std::string& norm) {
  rf::LetorFile file = rf::read_letor(path);
  for (const auto& w : file.warnings) std::cerr << "warning: " << path << ": " << w << '\n';
  if (!norm.empty()) rf::NormalizationSpec::load(norm).apply(file.vectors);
  return rf::GroupedVectors::from(std::move(file.vectors));
}

int run_predict(const PipelineConfig& cfg, const PredictArgs& args) {
  const rf::Ranker model = rf::load_model(args.model);
  const rf::GroupedVectors data = load_grouped(args.input, args.norm);
  const std::vector<rf::RankedGroup> ranking = rf::predict(model, data);

  std::string out;
  for (const rf::RankedGroup& group : ranking) {
    for (std::size_t r = 0; r < group.docs.size(); ++r) {
      out += std::to_string(group.qid) + "\t" + group.docs[r].doc_id + "\t" +
             std::to_string(r + 1) + "\t" + rf::format_double(group.docs[r].score) + "\n";
    }
  }
  write_text(args.output, out);
  archive_config(cfg, args.output + ".config.json");
  std::cout << "predict: groups=" << ranking.size() << " -> " << args.output << '\n';
  return 0;
}

int run_eval(const PipelineConfig& cfg, const PredictArgs& args) {
  const rf::Ranker model = rf::load_model(args.model);
  const rf::GroupedVectors data = load_grouped(args.input, args.norm);
  const rf::EvalReport report =
      rf::evaluate(model, data, cfg.dcg_cutoff, rf::parse_gain(cfg.gain));
  write_text(args.output, rf::eval_report_tsv(report));
  archive_config(cfg, args.output + ".config.json");
  std::cout << "eval: mean_dcg@" << report.k << "=" << rf::format_double(report.mean_dcg)
            << " queries=" << report.query_count << " gain=" << rf::gain_name(report.gain)
            << '\n';
  return 0;
}

struct AblateArgs {
  std::string train, valid, algo, output;
};

int run_ablate(const PipelineConfig& cfg, const AblateArgs& args) {
  const rf::Algo algo = rf::parse_algo(args.algo);
  rf::LetorFile train_file = rf::read_letor(args.train);
  rf::LetorFile valid_file = rf::read_letor(args.valid);
  if (resolve_normalize(cfg, algo)) {
    rf::normalize_features(train_file.vectors, {&valid_file.vectors});
  }
  const rf::GroupedVectors train_set = rf::GroupedVectors::from(std::move(train_file.vectors));
  const rf::GroupedVectors valid_set = rf::GroupedVectors::from(std::move(valid_file.vectors));

  const rf::AblationReport report =
      rf::ablation_study(train_set, valid_set, rf::default_ablation_plan(), train_config(cfg), algo);
  write_text(args.output, rf::ablation_report_tsv(report));
  archive_config(cfg, args.output + ".config.json");
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "ablate: baseline=" << rf::format_double(report.baseline_dcg);
  if (!report.rows.empty()) {
    std::cout << " worst_removal=" << report.rows.front().name << " ("
              << rf::format_double(report.rows.front().delta) << ")";
  }
  std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  PipelineConfig cfg;

  // The config file seeds every default below, so flags given on the command
  // line override it.
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string_view arg = argv[i];
      std::string path;
      if (arg == "--config" && i + 1 < argc) {
        path = argv[i + 1];
      } else if (arg.starts_with("--config=")) {
        path = std::string(arg.substr(9));
      } else {
        continue;
      }
      std::ifstream in(path);
      if (!in) throw rf::DataError("cannot open config file: " + path);
      config_from_json(json::parse(in), cfg);
      break;
    }
  } catch (const json::exception& e) {
    std::cerr << "data error: bad config file: " << e.what() << '\n';
    return 2;
  } catch (const rf::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  }

  CLI::App app{"rankfuse: preprocessing, lexical features and learning-to-rank pipeline"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");
  app.add_option("--threads", cfg.threads, "max worker threads (0 = hardware default)");
  app.add_option("--seed", cfg.seed, "seed for every stochastic step");
  app.add_option("--gain", cfg.gain, "DCG gain: exponential or linear");

  PrepArgs prep;
  CLI::App* prep_cmd = app.add_subcommand("prep", "remap qids, split train/valid, extract stopwords");
  prep_cmd->add_option("--input", prep.input, "annotation TSV")->required();
  prep_cmd->add_option("--test-queries", prep.test_queries, "query file steering the split");
  prep_cmd->add_option("--out-dir", prep.out_dir, "output directory")->required();
  prep_cmd->add_option("--fraction", cfg.split_fraction, "validation fraction of qids");
  prep_cmd->add_option("--stopword-k", cfg.stopword_k, "stopword cutoff");

  StatsArgs stats;
  CLI::App* stats_cmd = app.add_subcommand("stats", "collection statistics for all three fields");
  stats_cmd->add_option("--input", stats.input, "annotation TSV")->required();
  stats_cmd->add_option("--out-dir", stats.out_dir, "output directory")->required();

  FeaturesArgs features;
  CLI::App* features_cmd = app.add_subcommand("features", "extract the 20-feature LETOR file");
  features_cmd->add_option("--input", features.input, "annotation TSV")->required();
  features_cmd->add_option("--stats-dir", features.stats_dir, "directory from the stats step")
      ->required();
  features_cmd->add_option("--stopwords", features.stopwords, "stopword file")->required();
  features_cmd->add_option("--external", features.external, "external score TSV (qid doc_id score)");
  features_cmd->add_option("--bucket-source", features.bucket_source,
                           "TSV whose queries fit the frequency buckets (default: --input)");
  features_cmd->add_option("--output", features.output, "LETOR output path")->required();

  TuneArgs tune;
  CLI::App* tune_cmd = app.add_subcommand("tune-bm25", "grid search BM25 k1 and b");
  tune_cmd->add_option("--input", tune.input, "annotation TSV")->required();
  tune_cmd->add_option("--stats", tune.stats, "stats file for the scored field")->required();
  tune_cmd->add_option("--report", tune.report, "also write the grid table here");
  tune_cmd->add_option("--k1-grid", cfg.grid_k1, "k1 candidates")->delimiter(',');
  tune_cmd->add_option("--b-grid", cfg.grid_b, "b candidates")->delimiter(',');

  TrainArgs train;
  CLI::App* train_cmd = app.add_subcommand("train", "train a ranker on LETOR files");
  train_cmd->add_option("--train", train.train, "training LETOR file")->required();
  train_cmd->add_option("--valid", train.valid, "validation LETOR file");
  train_cmd->add_option("--algo", train.algo, "ca or lambdamart")->required();
  train_cmd->add_option("--model-out", train.model_out, "model output path")->required();
  train_cmd->add_option("--norm-out", train.norm_out,
                        "normalization spec path (default: <model-out>.norm)");
  train_cmd->add_option("--normalize", cfg.normalize, "auto, on or off");

  PredictArgs predict;
  CLI::App* predict_cmd = app.add_subcommand("predict", "rank a LETOR file with a model");
  predict_cmd->add_option("--model", predict.model, "model file")->required();
  predict_cmd->add_option("--input", predict.input, "LETOR file")->required();
  predict_cmd->add_option("--norm", predict.norm, "normalization spec to apply first");
  predict_cmd->add_option("--output", predict.output, "run file output path")->required();

  PredictArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "per-query and mean DCG report");
  eval_cmd->add_option("--model", eval.model, "model file")->required();
  eval_cmd->add_option("--input", eval.input, "LETOR file")->required();
  eval_cmd->add_option("--norm", eval.norm, "normalization spec to apply first");
  eval_cmd->add_option("--output", eval.output, "report output path")->required();

  AblateArgs ablate;
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "feature-group ablation study");
  ablate_cmd->add_option("--train", ablate.train, "training LETOR file")->required();
  ablate_cmd->add_option("--valid", ablate.valid, "validation LETOR file")->required();
  ablate_cmd->add_option("--algo", ablate.algo, "ca or lambdamart")->required();
  ablate_cmd->add_option("--output", ablate.output, "report output path")->required();
  ablate_cmd->add_option("--normalize", cfg.normalize, "auto, on or off");

  // Global flags (--config, --threads, ...) are valid after a subcommand too.
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  }

  try {
    rf::parallel::set_max_threads(cfg.threads);
    if (app.got_subcommand(prep_cmd)) return run_prep(cfg, prep);
    if (app.got_subcommand(stats_cmd)) return run_stats(cfg, stats);
    if (app.got_subcommand(features_cmd)) return run_features(cfg, features);
    if (app.got_subcommand(tune_cmd)) return run_tune(cfg, tune);
    if (app.got_subcommand(train_cmd)) return run_train(cfg, train);
    if (app.got_subcommand(predict_cmd)) return run_predict(cfg, predict);
    if (app.got_subcommand(eval_cmd)) return run_eval(cfg, eval);
    if (app.got_subcommand(ablate_cmd)) return run_ablate(cfg, ablate);
    std::cerr << "usage error: no subcommand\n";
    return 1;
  } catch (const rf::Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
}
