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

#ifndef LEXFORGE_METRICS_H_
#define LEXFORGE_METRICS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexforge/textcore.h"

namespace lexforge {

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double integrity = 0.0;
  double accuracy = 0.0;

  size_t gold_changed = 0;
  size_t predicted_changed = 0;
  size_t correct_changed = 0;
  size_t gold_keep = 0;
  size_t kept = 0;  // gold-KEEP positions predicted KEEP
  size_t sentences = 0;
  size_t exact_sentences = 0;
};

// Token-level scores over rewritten positions plus sentence exact match.
// Ratios with a zero denominator are 0, except integrity, which is 1 when
// there are no gold-KEEP positions. Throws ShapeError naming the first
// sentence whose shape differs.
MetricsReport Evaluate(const std::vector<AlignedSentence> &gold,
                       const std::vector<std::vector<Label>> &predicted);

nlohmann::ordered_json ToJson(const MetricsReport &report);

}  // namespace lexforge

#endif  // LEXFORGE_METRICS_H_
