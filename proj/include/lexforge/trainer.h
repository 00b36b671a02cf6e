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

#ifndef LEXFORGE_TRAINER_H_
#define LEXFORGE_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "lexforge/checkpoint.h"
#include "lexforge/corpus.h"
#include "lexforge/metrics.h"
#include "lexforge/weakrules.h"

namespace lexforge {

enum class StudentOptimizer { kGradientDescent, kAdam };

struct TrainConfig {
  double alpha = 1.0;
  double beta = 0.5;
  double p = 0.0;  // diacritics-removal ratio for train and dev inputs
  uint64_t seed = 42;
  int iterations = 3;
  double tau = 0.7;
  StudentOptimizer optimizer = StudentOptimizer::kAdam;
  double learning_rate = 0.03;
  int epochs_per_phase = 50;
  double teacher_learning_rate = 2.0;
  int teacher_epochs = 50;
  size_t feature_dims = kDefaultFeatureDims;
  size_t hidden_dims = kDefaultHiddenDims;
  double init_scale = 0.01;
  double teacher_init_scale = 0.01;

  std::filesystem::path train_path;
  std::filesystem::path dev_path;
  std::filesystem::path test_path;
  std::filesystem::path unlabeled_path;
  std::filesystem::path dictionary_path;
  std::filesystem::path rules_path;  // empty: built-in default rules
  std::filesystem::path output_dir;
};

// Throws ValidationError describing the first violated constraint.
void ValidateTrainConfig(const TrainConfig &config);

// `key = value` lines; '#' starts a comment. Relative paths are resolved
// against `base_dir`. Unknown keys and malformed values are ParseErrors.
TrainConfig ParseTrainConfig(std::string_view contents,
                             const std::string &source_name,
                             const std::filesystem::path &base_dir);
TrainConfig LoadTrainConfig(const std::filesystem::path &path);

// Points the four corpus paths at `dir`/{train,dev,test,unlabeled}.csv.
void SetCorpusDir(TrainConfig *config, const std::filesystem::path &dir);

struct IterationRecord {
  int iteration = 0;
  MetricsReport dev;
  size_t pseudo_labels = 0;
  double mean_confidence = 0.0;
  double teacher_loss = 0.0;  // final pre-step loss; 0 at iteration 0
  LossBreakdown student_loss;  // final pre-step loss
};

struct TrainReport {
  std::vector<IterationRecord> iterations;
  int best_iteration = 0;
  size_t skipped_train = 0;
  size_t skipped_dev = 0;
  size_t skipped_test = 0;
  size_t vocab_size = 0;
  std::vector<std::string> rule_names;
  MetricsReport test;  // best model on unperturbed test inputs
};

nlohmann::ordered_json ToJson(const TrainReport &report);

struct TrainInputs {
  Corpus corpus;
  std::shared_ptr<const Dictionary> dictionary;
  RuleSet rules;
};

TrainInputs LoadTrainInputs(const TrainConfig &config);

struct TrainResult {
  ModelBundle best;
  TrainReport report;
  std::vector<std::string> log;
};

// Iteration 0 trains the student on labeled data. Every later iteration
// trains the teacher on labeled data against the current student, pseudo-
// labels the unlabeled stream, and retrains the student on gold plus
// confidence-weighted pseudo labels. The returned bundle is the iteration
// with the best dev F1 (earliest on ties). Errors are rethrown as Error
// prefixed with the failing phase.
TrainResult RunSelfTraining(const TrainConfig &config,
                            const TrainInputs &inputs);
TrainResult RunSelfTraining(const TrainConfig &config);

// Writes checkpoints/best.ckpt, report.json and log.txt. Everything is
// staged in a temporary directory first, so a failure leaves no partial
// output.
void WriteTrainOutputs(const TrainResult &result,
                       const std::filesystem::path &dir);

// Scores a bundle on a labeled split with the pipeline's decision rule.
MetricsReport EvaluateModel(const ModelBundle &model,
                            const std::vector<AlignedSentence> &sentences,
                            double nsw_threshold);

}  // namespace lexforge

#endif  // LEXFORGE_TRAINER_H_
