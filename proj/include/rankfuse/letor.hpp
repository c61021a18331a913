// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_LETOR_HPP_
#define RANKFUSE_LETOR_HPP_

#include <array>
#include <string>
#include <vector>

#include "rankfuse/features.hpp"

namespace rankfuse {

// LETOR line grammar (one vector per line):
//   <label> qid:<qid> 1:<v1> 2:<v2> ... 20:<v20> # <doc_id>
// Values are shortest-round-trip decimals, so reading recovers the written
// doubles exactly. The writer orders lines by (qid, doc_id); the reader
// tolerates missing feature ids (filled with 0, surfaced as a warning) and
// arbitrary trailing comments.

void write_letor(const std::vector<FeatureVector>& vectors, const std::string& path);
std::string letor_line(const FeatureVector& fv);

struct LetorFile {
  std::vector<FeatureVector> vectors;
  std::vector<std::string> warnings;
};

LetorFile read_letor(const std::string& path);
LetorFile read_letor_text(const std::string& text);

/// Per-feature min-max scaling fitted on training extremes. Applying maps
/// into [0,1] (out-of-range values clamp); constant features map to 0.
struct NormalizationSpec {
  std::array<double, kNumFeatures> min{};
  std::array<double, kNumFeatures> max{};

  static NormalizationSpec fit(const std::vector<FeatureVector>& train);

  double apply_value(int id, double v) const;
  void apply(std::vector<FeatureVector>& vectors) const;

  // Text persistence: header plus one "id min max" line per feature.
  void save(const std::string& path) const;
  static NormalizationSpec load(const std::string& path);
};

/// Fits on train and scales train plus every other set with the same spec.
NormalizationSpec normalize_features(std::vector<FeatureVector>& train,
                                     std::vector<std::vector<FeatureVector>*> others = {});

}  // namespace rankfuse

#endif  // RANKFUSE_LETOR_HPP_
