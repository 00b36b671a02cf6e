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

#include "lexforge/teacher.h"

#include <cmath>
#include <random>

#include "lexforge/errors.h"

namespace lexforge {

namespace {

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct AggregateTrace {
  Eigen::VectorXd context;
  Eigen::VectorXd numerator;
  double normalizer = 1.0;
  std::vector<double> attention;  // per rule, 0 for inactive ones
  double student_attention = 0.0;
};

AggregateTrace Trace(const RanParams &ran, const SparseVector &features,
                     std::span<const int> rule_targets,
                     const Eigen::VectorXd &student_dist) {
  const size_t rules = ran.num_rules();
  if (rule_targets.size() != rules) {
    throw ShapeError("expected " + std::to_string(rules) +
                     " rule verdicts, got " +
                     std::to_string(rule_targets.size()));
  }
  AggregateTrace t;
  t.context = Context(ran, features);
  const Eigen::Index v = student_dist.size();
  t.numerator = Eigen::VectorXd::Constant(v, 1.0 / static_cast<double>(v));
  t.normalizer = 1.0;
  t.attention.assign(rules, 0.0);
  for (size_t j = 0; j < rules; ++j) {
    const int target = rule_targets[j];
    if (target < 0) continue;
    if (target >= v) throw ShapeError("rule target outside the vocabulary");
    const double a = Attention(ran, t.context, static_cast<int>(j));
    t.attention[j] = a;
    t.numerator(target) += a;
    t.normalizer += a;
  }
  t.student_attention = Attention(ran, t.context, ran.student_source());
  t.numerator += t.student_attention * student_dist;
  t.normalizer += t.student_attention;
  return t;
}

double Evaluate(const RanParams &ran, std::span<const TeacherExample> batch,
                RanParams *grad) {
  if (batch.empty()) throw ValidationError("teacher batch is empty");
  const double n = static_cast<double>(batch.size());
  if (grad != nullptr) {
    *grad = RanParams::Zeros(ran.num_rules(), ran.feature_dims(),
                             ran.hidden_dims());
  }
  double total = 0.0;
  for (const TeacherExample &ex : batch) {
    AggregateTrace t = Trace(ran, ex.features, ex.rule_targets, ex.student_dist);
    const double n_gold = t.numerator(ex.gold_index);
    total += std::log(t.normalizer) - std::log(n_gold);
    if (grad == nullptr) continue;

    Eigen::VectorXd d_context = Eigen::VectorXd::Zero(ran.hidden_dims());
    auto accumulate = [&](int source, double d_attention, double a) {
      const double g = d_attention * a * (1.0 - a) / n;
      grad->source_embeddings.row(source) += g * t.context.transpose();
      d_context += g * ran.source_embeddings.row(source).transpose();
    };
    for (size_t j = 0; j < ran.num_rules(); ++j) {
      const int target = ex.rule_targets[j];
      if (target < 0) continue;
      const double d_a =
          (target == ex.gold_index ? -1.0 / n_gold : 0.0) + 1.0 / t.normalizer;
      accumulate(static_cast<int>(j), d_a, t.attention[j]);
    }
    const double d_student =
        -ex.student_dist(ex.gold_index) / n_gold + 1.0 / t.normalizer;
    accumulate(ran.student_source(), d_student, t.student_attention);
    for (size_t k = 0; k < ex.features.nnz(); ++k) {
      grad->context_projection.row(ex.features.index[k]) +=
          ex.features.value[k] * d_context.transpose();
    }
  }
  return total / n;
}

}  // namespace

int SoftLabel::Argmax() const {
  Eigen::Index idx = 0;
  probs.maxCoeff(&idx);
  return static_cast<int>(idx);
}

double SoftLabel::MaxProb() const { return probs.maxCoeff(); }

RanParams RanParams::Zeros(size_t num_rules, size_t feature_dims,
                           size_t hidden_dims) {
  RanParams p;
  p.source_embeddings = Eigen::MatrixXd::Zero(num_rules + 1, hidden_dims);
  p.context_projection = RowMatrix::Zero(feature_dims, hidden_dims);
  return p;
}

RanParams RanParams::Random(size_t num_rules, size_t feature_dims,
                            size_t hidden_dims, uint64_t seed, double scale) {
  RanParams p = Zeros(num_rules, feature_dims, hidden_dims);
  std::mt19937_64 gen(seed);
  auto draw = [&] {
    return (2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0) * scale;
  };
  for (Eigen::Index r = 0; r < p.source_embeddings.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.source_embeddings.cols(); ++c) {
      p.source_embeddings(r, c) = draw();
    }
  }
  for (Eigen::Index r = 0; r < p.context_projection.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.context_projection.cols(); ++c) {
      p.context_projection(r, c) = draw();
    }
  }
  return p;
}

bool RanParams::AllFinite() const {
  return source_embeddings.allFinite() && context_projection.allFinite();
}

bool RanParams::operator==(const RanParams &other) const {
  return source_embeddings.rows() == other.source_embeddings.rows() &&
         source_embeddings.cols() == other.source_embeddings.cols() &&
         context_projection.rows() == other.context_projection.rows() &&
         context_projection.cols() == other.context_projection.cols() &&
         source_embeddings == other.source_embeddings &&
         context_projection == other.context_projection;
}

std::vector<int> VerdictTargets(const std::vector<RuleVerdict> &verdicts,
                                std::string_view token,
                                const CandidateVocab &vocab) {
  std::vector<int> targets;
  targets.reserve(verdicts.size());
  for (const RuleVerdict &v : verdicts) {
    targets.push_back(v.abstains() ? -1 : vocab.IndexFor(token, *v.candidate));
  }
  return targets;
}

Eigen::VectorXd Context(const RanParams &ran, const SparseVector &features) {
  const size_t rows = ran.context_projection.rows();
  if (!features.index.empty() && features.index.back() >= rows) {
    throw ShapeError("feature index exceeds the context projection");
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(ran.hidden_dims());
  for (size_t k = 0; k < features.nnz(); ++k) {
    c += features.value[k] *
         ran.context_projection.row(features.index[k]).transpose();
  }
  return c;
}

double Attention(const RanParams &ran, const Eigen::VectorXd &context,
                 int source) {
  return Sigmoid(ran.source_embeddings.row(source).dot(context));
}

SoftLabel Aggregate(const RanParams &ran, const SparseVector &features,
                    std::span<const int> rule_targets,
                    const Eigen::VectorXd &student_dist) {
  AggregateTrace t = Trace(ran, features, rule_targets, student_dist);
  return SoftLabel{t.numerator / t.normalizer};
}

double TeacherLoss(const RanParams &ran,
                   std::span<const TeacherExample> batch) {
  return Evaluate(ran, batch, nullptr);
}

double TeacherLossAndGradient(const RanParams &ran,
                              std::span<const TeacherExample> batch,
                              RanParams *grad) {
  return Evaluate(ran, batch, grad);
}

double TrainTeacherStep(RanParams *ran, std::span<const TeacherExample> batch,
                        double learning_rate) {
  RanParams grad;
  const double loss = Evaluate(*ran, batch, &grad);
  if (!std::isfinite(loss) || !grad.AllFinite()) {
    throw NumericError("non-finite loss or gradient in the rule attention "
                       "network");
  }
  if (learning_rate != 0.0) {
    ran->source_embeddings -= learning_rate * grad.source_embeddings;
    ran->context_projection -= learning_rate * grad.context_projection;
  }
  return loss;
}

std::vector<PseudoLabel> PseudoLabelCorpus(
    const RanParams &ran, const std::vector<std::vector<Token>> &corpus,
    const RuleSet &rules, const StudentParams &student,
    const CandidateVocab &vocab, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw ValidationError("confidence threshold must lie in [0, 1]");
  }
  std::vector<PseudoLabel> out;
  const size_t dims = student.feature_dims();
  for (size_t s = 0; s < corpus.size(); ++s) {
    const std::vector<Token> &tokens = corpus[s];
    for (size_t i = 0; i < tokens.size(); ++i) {
      SparseVector features = FeaturizeAt(tokens, i, dims);
      const std::string_view left = i > 0 ? tokens[i - 1].surface : "";
      const std::string_view right =
          i + 1 < tokens.size() ? tokens[i + 1].surface : "";
      std::vector<int> targets = VerdictTargets(
          rules.Apply(tokens[i].surface, left, right), tokens[i].surface,
          vocab);
      StudentOutput student_out = Forward(student, features);
      SoftLabel label =
          Aggregate(ran, features, targets, student_out.norm_dist);
      const double confidence = label.MaxProb();
      if (confidence >= tau) {
        out.push_back({s, i, std::move(label), confidence});
      }
    }
  }
  return out;
}

}  // namespace lexforge
