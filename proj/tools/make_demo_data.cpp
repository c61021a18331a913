// SPDX-License-Identifier: Apache-2.0
//
// Regenerates the bundled demo corpus. Output is deterministic for a given
// seed, so the committed files under data/toy can be reproduced exactly.
#include <filesystem>
#include <iostream>
#include <string>

#include "rankfuse/corpus.hpp"
#include "rankfuse/synth.hpp"

namespace rf = rankfuse;

int main(int argc, char** argv) {
  std::string out_dir = "data/toy";
  std::uint64_t seed = 1;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--out-dir" && i + 1 < argc) {
      out_dir = argv[++i];
    } else if (arg == "--seed" && i + 1 < argc) {
      seed = std::stoull(argv[++i]);
    } else {
      std::cerr << "usage: make-demo-data [--out-dir DIR] [--seed N]\n";
      return 1;
    }
  }

  try {
    std::filesystem::create_directories(out_dir);
    rf::LexicalSynthConfig config;
    config.num_queries = 24;
    config.docs_per_query = 8;
    config.num_test_queries = 8;
    config.vocab_size = 300;
    config.seed = seed;

    const rf::SynthCorpus corpus = rf::synth_lexical_corpus(config);
    const std::filesystem::path dir(out_dir);
    rf::write_dataset(corpus.dataset, (dir / "annotations.tsv").string());
    rf::write_query_file(corpus.test_queries, (dir / "test_queries.txt").string());

    // Annotation files carry no doc id column; parsing assigns ids by line
    // number. The external score sidecars therefore key against the split
    // files the prep step will write, reproduced here with default settings.
    const rf::Dataset parsed = rf::parse_dataset((dir / "annotations.tsv").string());
    rf::SplitResult split =
        rf::split_by_similarity(rf::remap_qids(parsed), corpus.test_queries);
    auto renumber = [](rf::Dataset& dataset) {
      for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        dataset.examples[i].document.doc_id = "d" + std::to_string(i + 1);
      }
    };
    renumber(split.train);
    renumber(split.valid);
    rf::write_external_scores(rf::synth_external_scores(split.train, seed),
                              (dir / "external_train.tsv").string());
    rf::write_external_scores(rf::synth_external_scores(split.valid, seed + 1),
                              (dir / "external_valid.tsv").string());
    std::cout << "wrote " << out_dir << ": examples=" << corpus.dataset.examples.size()
              << " test_queries=" << corpus.test_queries.size() << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
