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

#ifndef LEXFORGE_TEACHER_H_
#define LEXFORGE_TEACHER_H_

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "lexforge/student.h"
#include "lexforge/weakrules.h"

namespace lexforge {

// Probability distribution over a CandidateVocab.
struct SoftLabel {
  Eigen::VectorXd probs;

  int Argmax() const;
  double MaxProb() const;
};

// Rule attention network. Row j < R of source_embeddings belongs to rule j,
// row R to the student.
struct RanParams {
  Eigen::MatrixXd source_embeddings;  // [(R+1) x d]
  RowMatrix context_projection;       // [H_feat x d]

  static RanParams Zeros(size_t num_rules, size_t feature_dims,
                         size_t hidden_dims);
  static RanParams Random(size_t num_rules, size_t feature_dims,
                          size_t hidden_dims, uint64_t seed, double scale);

  size_t num_rules() const { return source_embeddings.rows() - 1; }
  size_t feature_dims() const { return context_projection.rows(); }
  size_t hidden_dims() const { return context_projection.cols(); }
  int student_source() const { return static_cast<int>(num_rules()); }

  bool AllFinite() const;
  bool operator==(const RanParams &other) const;
};

// Vocabulary index each verdict votes for; -1 for abstentions and
// candidates outside the vocabulary. A candidate equal to the token votes
// KEEP.
std::vector<int> VerdictTargets(const std::vector<RuleVerdict> &verdicts,
                                std::string_view token,
                                const CandidateVocab &vocab);

// Context vector features . context_projection.
Eigen::VectorXd Context(const RanParams &ran, const SparseVector &features);

// Attention of source j (rule id, or student_source()) for a context.
double Attention(const RanParams &ran, const Eigen::VectorXd &context,
                 int source);

// Normalizes  sum_j a_j onehot(target_j) + a_student * student_dist
// + uniform. `rule_targets` has one entry per rule (-1 = no vote).
SoftLabel Aggregate(const RanParams &ran, const SparseVector &features,
                    std::span<const int> rule_targets,
                    const Eigen::VectorXd &student_dist);

struct TeacherExample {
  SparseVector features;
  std::vector<int> rule_targets;
  Eigen::VectorXd student_dist;
  int gold_index = 0;
};

// Mean cross-entropy of Aggregate() against the gold indices. Throws
// ValidationError for an empty batch.
double TeacherLoss(const RanParams &ran, std::span<const TeacherExample> batch);
double TeacherLossAndGradient(const RanParams &ran,
                              std::span<const TeacherExample> batch,
                              RanParams *grad);

// One gradient-descent step; returns the pre-step loss. Throws NumericError
// on a non-finite loss or gradient (params untouched).
double TrainTeacherStep(RanParams *ran, std::span<const TeacherExample> batch,
                        double learning_rate);

struct PseudoLabel {
  size_t sentence = 0;
  size_t token = 0;
  SoftLabel label;
  double weight = 0.0;
};

// Aggregates every token of `corpus` and keeps those whose top probability
// reaches `tau` (weight = that probability).
std::vector<PseudoLabel> PseudoLabelCorpus(
    const RanParams &ran, const std::vector<std::vector<Token>> &corpus,
    const RuleSet &rules, const StudentParams &student,
    const CandidateVocab &vocab, double tau);

}  // namespace lexforge

#endif  // LEXFORGE_TEACHER_H_
