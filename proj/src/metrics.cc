// Copyright 2026 The LexForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lexforge/metrics.h"

#include "lexforge/errors.h"

namespace lexforge {

namespace {

double Ratio(size_t num, size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport Evaluate(const std::vector<AlignedSentence> &gold,
                       const std::vector<std::vector<Label>> &predicted) {
  if (gold.size() != predicted.size()) {
    throw ShapeError("gold has " + std::to_string(gold.size()) +
                     " sentences but predictions have " +
                     std::to_string(predicted.size()));
  }
  MetricsReport r;
  r.sentences = gold.size();
  for (size_t s = 0; s < gold.size(); ++s) {
    const std::vector<Label> &g = gold[s].gold_labels;
    const std::vector<Label> &p = predicted[s];
    if (g.size() != p.size()) {
      throw ShapeError("sentence " + std::to_string(s) + " has " +
                       std::to_string(g.size()) + " gold labels but " +
                       std::to_string(p.size()) + " predictions");
    }
    bool exact = true;
    for (size_t i = 0; i < g.size(); ++i) {
      if (!g[i].is_keep()) ++r.gold_changed;
      if (!p[i].is_keep()) ++r.predicted_changed;
      if (!g[i].is_keep() && !p[i].is_keep() && g[i].target() == p[i].target()) {
        ++r.correct_changed;
      }
      if (g[i].is_keep()) {
        ++r.gold_keep;
        if (p[i].is_keep()) ++r.kept;
      }
      if (!(g[i] == p[i])) exact = false;
    }
    if (exact) ++r.exact_sentences;
  }
  r.precision = Ratio(r.correct_changed, r.predicted_changed);
  r.recall = Ratio(r.correct_changed, r.gold_changed);
  r.f1 = r.precision + r.recall > 0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  r.integrity = r.gold_keep == 0 ? 1.0 : Ratio(r.kept, r.gold_keep);
  r.accuracy = Ratio(r.exact_sentences, r.sentences);
  return r;
}

nlohmann::ordered_json ToJson(const MetricsReport &report) {
  nlohmann::ordered_json j;
  j["f1"] = report.f1;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["integrity"] = report.integrity;
  j["accuracy"] = report.accuracy;
  j["counts"] = {{"gold_changed", report.gold_changed},
                 {"predicted_changed", report.predicted_changed},
                 {"correct_changed", report.correct_changed},
                 {"gold_keep", report.gold_keep},
                 {"kept", report.kept},
                 {"sentences", report.sentences},
                 {"exact_sentences", report.exact_sentences}};
  return j;
}

}  // namespace lexforge
