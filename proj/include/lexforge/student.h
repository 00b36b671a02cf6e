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

#ifndef LEXFORGE_STUDENT_H_
#define LEXFORGE_STUDENT_H_

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexforge/dictionary.h"
#include "lexforge/textcore.h"

namespace lexforge {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr size_t kMinFeatureDims = 256;
inline constexpr size_t kDefaultFeatureDims = 4096;
inline constexpr size_t kDefaultHiddenDims = 64;

// Sorted by index, no duplicate indices, no zero values.
struct SparseVector {
  std::vector<uint32_t> index;
  std::vector<double> value;

  size_t nnz() const { return index.size(); }
  bool operator==(const SparseVector &) const = default;
};

// 64-bit FNV-1a over the UTF-8 bytes of an n-gram.
uint64_t HashNgram(std::string_view utf8);

// Character 2- and 3-gram counts of "^" + lower(text) + "$". The feature
// space is split in three equal blocks of dims/3 slots (token, left, right);
// an n-gram lands at block_offset + hash % (dims/3).
SparseVector Featurize(std::string_view token,
                       std::optional<std::string_view> left,
                       std::optional<std::string_view> right,
                       size_t dims = kDefaultFeatureDims);

// Features of token i in context (neighbours absent at sentence edges).
SparseVector FeaturizeAt(const std::vector<Token> &tokens, size_t i,
                         size_t dims = kDefaultFeatureDims);

// Closed set of normalization targets. Index 0 is KEEP.
class CandidateVocab {
 public:
  static constexpr int kKeep = 0;

  CandidateVocab();
  // `candidates` must not contain duplicates; KEEP is added in front.
  explicit CandidateVocab(std::vector<std::string> candidates);

  // Union of the gold rewrites in `labeled` and all dictionary standard
  // forms, sorted.
  static CandidateVocab Build(const std::vector<AlignedSentence> &labeled,
                              const Dictionary &dict);

  // -1 when absent.
  int Index(std::string_view candidate) const;
  // KEEP -> 0; rewrite -> its index or -1.
  int IndexOf(const Label &label) const;
  // Index of `candidate` read as output for `source` (KEEP if equal).
  int IndexFor(std::string_view source, std::string_view candidate) const;

  Label LabelAt(int index) const;
  // Entry 0 is "<KEEP>".
  const std::string &display(int index) const { return display_[index]; }
  // Rewrite candidates only, in index order starting at 1.
  std::vector<std::string> Candidates() const;
  size_t size() const { return display_.size(); }

  bool operator==(const CandidateVocab &other) const {
    return display_ == other.display_;
  }

 private:
  std::vector<std::string> display_;
  std::unordered_map<std::string, int> index_;
};

struct StudentParams {
  RowMatrix feature_projection;     // [H_feat x d]
  Eigen::VectorXd hidden_bias;      // [d]
  Eigen::MatrixXd norm_weights;     // [d x |V|]
  Eigen::VectorXd norm_bias;        // [|V|]
  Eigen::VectorXd nsw_weights;      // [d]
  double nsw_bias = 0.0;

  static StudentParams Zeros(size_t feature_dims, size_t hidden_dims,
                             size_t vocab_size);
  // Matrices uniform(-scale, scale) from a seeded stream, biases zero.
  static StudentParams Random(size_t feature_dims, size_t hidden_dims,
                              size_t vocab_size, uint64_t seed,
                              double scale = 0.01);

  size_t feature_dims() const { return feature_projection.rows(); }
  size_t hidden_dims() const { return feature_projection.cols(); }
  size_t vocab_size() const { return norm_bias.size(); }

  bool AllFinite() const;
  // params += scale * other
  void AddScaled(const StudentParams &other, double scale);
  void SetZero();

  bool operator==(const StudentParams &other) const;
};

struct StudentOutput {
  Eigen::VectorXd norm_dist;  // softmax over the vocabulary
  double nsw_prob = 0.5;
  Eigen::VectorXd hidden;
  Eigen::VectorXd norm_logits;
  double nsw_logit = 0.0;
};

// Throws ShapeError when a feature index falls outside the projection.
StudentOutput Forward(const StudentParams &params,
                      const SparseVector &features);

struct StudentExample {
  SparseVector features;
  // Hard target index; -1 means `soft_target` is used instead.
  int gold_index = -1;
  Eigen::VectorXd soft_target;
  // Target for the detection head, in [0, 1].
  double nsw_target = 0.0;
  // Scales both loss terms of this example linearly.
  double weight = 1.0;
};

struct LossBreakdown {
  double l_norm = 0.0;
  double l_nsw = 0.0;
  double l_total = 0.0;
  double alpha = 1.0;
  double beta = 0.5;
};

// Mean (over the batch, weighted per example) cross-entropy of the
// normalization head and binary cross-entropy of the detection head,
// combined as alpha * l_norm + beta * l_nsw. Examples are summed in order.
// Throws ValidationError for an empty batch or invalid alpha/beta.
LossBreakdown Loss(const StudentParams &params,
                   std::span<const StudentExample> batch, double alpha,
                   double beta);

// Same as Loss and fills `grad` (resized to match params) with the gradient
// of l_total.
LossBreakdown LossAndGradient(const StudentParams &params,
                              std::span<const StudentExample> batch,
                              double alpha, double beta, StudentParams *grad);

// One full-batch gradient-descent step. Throws NumericError naming the head
// whose loss or gradient is not finite; params are untouched in that case.
LossBreakdown TrainStep(StudentParams *params,
                        std::span<const StudentExample> batch, double alpha,
                        double beta, double learning_rate);

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Full-batch steps with bias-corrected first and second moment estimates.
// Moments are reset whenever the parameter shapes change.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamConfig config = {});

  // Same error contract as TrainStep.
  LossBreakdown Step(StudentParams *params,
                     std::span<const StudentExample> batch, double alpha,
                     double beta);

  int steps() const { return steps_; }

 private:
  AdamConfig config_;
  StudentParams m_;
  StudentParams v_;
  int steps_ = 0;
};

}  // namespace lexforge

#endif  // LEXFORGE_STUDENT_H_
