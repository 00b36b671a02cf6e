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

#include "lexforge/student.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "lexforge/errors.h"

namespace lexforge {

namespace {

const std::string kKeepDisplay = "<KEEP>";

// Rows per block when evaluating a batch; bounds the temporary matrices.
constexpr size_t kBlockRows = 1024;

void AddNgrams(std::string_view text, uint32_t offset, uint32_t block,
               std::map<uint32_t, double> *counts) {
  std::u32string cps = U"^" + ToCodePoints(ToLower(text)) + U"$";
  for (size_t n = 2; n <= 3; ++n) {
    if (cps.size() < n) continue;
    for (size_t i = 0; i + n <= cps.size(); ++i) {
      const std::string gram =
          FromCodePoints(std::u32string_view(cps).substr(i, n));
      (*counts)[offset + static_cast<uint32_t>(HashNgram(gram) % block)] += 1.0;
    }
  }
}

double UniformDraw(std::mt19937_64 &gen, double scale) {
  const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return (2.0 * u - 1.0) * scale;
}

template <typename Matrix>
void FillUniform(Matrix *m, std::mt19937_64 &gen, double scale) {
  for (Eigen::Index r = 0; r < m->rows(); ++r) {
    for (Eigen::Index c = 0; c < m->cols(); ++c) {
      (*m)(r, c) = UniformDraw(gen, scale);
    }
  }
}

double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void CheckHyperparameters(std::span<const StudentExample> batch, double alpha,
                          double beta) {
  if (batch.empty()) throw ValidationError("loss requires a non-empty batch");
  if (!(alpha >= 0.0) || !(beta >= 0.0) || (alpha == 0.0 && beta == 0.0)) {
    throw ValidationError("alpha and beta must be >= 0 and not both zero");
  }
}

void CheckShapes(const StudentParams &params, const StudentExample &example) {
  const size_t rows = params.feature_projection.rows();
  if (!example.features.index.empty() && example.features.index.back() >= rows) {
    throw ShapeError("feature index " +
                     std::to_string(example.features.index.back()) +
                     " exceeds projection rows " + std::to_string(rows));
  }
  if (example.gold_index >= static_cast<int>(params.vocab_size()) ||
      (example.gold_index < 0 &&
       example.soft_target.size() != static_cast<Eigen::Index>(params.vocab_size()))) {
    throw ShapeError("example target does not match vocabulary size " +
                     std::to_string(params.vocab_size()));
  }
}

// Shared forward/backward over the batch. `grad` may be null.
LossBreakdown Evaluate(const StudentParams &params,
                       std::span<const StudentExample> batch, double alpha,
                       double beta, StudentParams *grad) {
  CheckHyperparameters(batch, alpha, beta);
  const Eigen::Index d = params.hidden_dims();
  const Eigen::Index v = params.vocab_size();
  const double n = static_cast<double>(batch.size());
  if (grad != nullptr) {
    *grad = StudentParams::Zeros(params.feature_dims(), d, v);
  }

  double norm_sum = 0.0;
  double nsw_sum = 0.0;
  for (size_t start = 0; start < batch.size(); start += kBlockRows) {
    const size_t rows = std::min(kBlockRows, batch.size() - start);
    Eigen::MatrixXd hidden(rows, d);
    for (size_t r = 0; r < rows; ++r) {
      const StudentExample &ex = batch[start + r];
      CheckShapes(params, ex);
      Eigen::VectorXd pre = params.hidden_bias;
      for (size_t k = 0; k < ex.features.nnz(); ++k) {
        pre += ex.features.value[k] *
               params.feature_projection.row(ex.features.index[k]).transpose();
      }
      hidden.row(r) = pre.array().tanh().matrix().transpose();
    }
    Eigen::MatrixXd logits = hidden * params.norm_weights;
    logits.rowwise() += params.norm_bias.transpose();
    Eigen::VectorXd nsw_logits =
        (hidden * params.nsw_weights).array() + params.nsw_bias;

    Eigen::MatrixXd d_logits(rows, v);
    Eigen::VectorXd d_nsw(rows);
    for (size_t r = 0; r < rows; ++r) {
      const StudentExample &ex = batch[start + r];
      const double scale = ex.weight / n;
      auto row = logits.row(r);
      const double max_logit = row.maxCoeff();
      const double lse =
          max_logit + std::log((row.array() - max_logit).exp().sum());
      double ce;
      if (ex.gold_index >= 0) {
        ce = lse - row(ex.gold_index);
      } else {
        ce = lse * ex.soft_target.sum() - row.dot(ex.soft_target.transpose());
      }
      const double z = nsw_logits(r);
      const double bce = Softplus(z) - ex.nsw_target * z;
      norm_sum += ex.weight * ce;
      nsw_sum += ex.weight * bce;

      if (grad != nullptr) {
        Eigen::RowVectorXd probs = (row.array() - lse).exp().matrix();
        if (ex.gold_index >= 0) {
          probs(ex.gold_index) -= 1.0;
        } else {
          probs = probs * ex.soft_target.sum() - ex.soft_target.transpose();
        }
        d_logits.row(r) = alpha * scale * probs;
        d_nsw(r) = beta * scale * (Sigmoid(z) - ex.nsw_target);
      }
    }
    if (grad == nullptr) continue;

    grad->norm_weights.noalias() += hidden.transpose() * d_logits;
    grad->norm_bias += d_logits.colwise().sum().transpose();
    grad->nsw_weights.noalias() += hidden.transpose() * d_nsw;
    grad->nsw_bias += d_nsw.sum();

    Eigen::MatrixXd d_hidden = d_logits * params.norm_weights.transpose();
    d_hidden.noalias() += d_nsw * params.nsw_weights.transpose();
    Eigen::MatrixXd d_pre =
        d_hidden.array() * (1.0 - hidden.array().square());
    grad->hidden_bias += d_pre.colwise().sum().transpose();
    for (size_t r = 0; r < rows; ++r) {
      const StudentExample &ex = batch[start + r];
      for (size_t k = 0; k < ex.features.nnz(); ++k) {
        grad->feature_projection.row(ex.features.index[k]) +=
            ex.features.value[k] * d_pre.row(r);
      }
    }
  }

  LossBreakdown loss;
  loss.alpha = alpha;
  loss.beta = beta;
  loss.l_norm = norm_sum / n;
  loss.l_nsw = nsw_sum / n;
  loss.l_total = alpha * loss.l_norm + beta * loss.l_nsw;
  return loss;
}

}  // namespace

uint64_t HashNgram(std::string_view utf8) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : utf8) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

SparseVector Featurize(std::string_view token,
                       std::optional<std::string_view> left,
                       std::optional<std::string_view> right, size_t dims) {
  if (dims < kMinFeatureDims) {
    throw ValidationError("feature dimension must be at least " +
                          std::to_string(kMinFeatureDims));
  }
  const auto block = static_cast<uint32_t>(dims / 3);
  std::map<uint32_t, double> counts;
  AddNgrams(token, 0, block, &counts);
  if (left) AddNgrams(*left, block, block, &counts);
  if (right) AddNgrams(*right, 2 * block, block, &counts);
  SparseVector out;
  out.index.reserve(counts.size());
  out.value.reserve(counts.size());
  for (const auto &[idx, count] : counts) {
    out.index.push_back(idx);
    out.value.push_back(count);
  }
  return out;
}

SparseVector FeaturizeAt(const std::vector<Token> &tokens, size_t i,
                         size_t dims) {
  std::optional<std::string_view> left;
  std::optional<std::string_view> right;
  if (i > 0) left = tokens[i - 1].surface;
  if (i + 1 < tokens.size()) right = tokens[i + 1].surface;
  return Featurize(tokens[i].surface, left, right, dims);
}

CandidateVocab::CandidateVocab() : display_{kKeepDisplay} {}

CandidateVocab::CandidateVocab(std::vector<std::string> candidates)
    : CandidateVocab() {
  for (std::string &c : candidates) {
    const int idx = static_cast<int>(display_.size());
    if (!index_.emplace(c, idx).second) {
      throw ValidationError("duplicate candidate \"" + c + "\"");
    }
    display_.push_back(std::move(c));
  }
}

CandidateVocab CandidateVocab::Build(
    const std::vector<AlignedSentence> &labeled, const Dictionary &dict) {
  std::set<std::string> all;
  for (const AlignedSentence &s : labeled) {
    for (const Label &label : s.gold_labels) {
      if (!label.is_keep()) all.insert(label.target());
    }
  }
  for (const auto &[key, entry] : dict.entries()) {
    all.insert(entry.standard_forms.begin(), entry.standard_forms.end());
  }
  return CandidateVocab(std::vector<std::string>(all.begin(), all.end()));
}

int CandidateVocab::Index(std::string_view candidate) const {
  auto it = index_.find(std::string(candidate));
  return it == index_.end() ? -1 : it->second;
}

int CandidateVocab::IndexOf(const Label &label) const {
  return label.is_keep() ? kKeep : Index(label.target());
}

int CandidateVocab::IndexFor(std::string_view source,
                             std::string_view candidate) const {
  return source == candidate ? kKeep : Index(candidate);
}

Label CandidateVocab::LabelAt(int index) const {
  return index == kKeep ? Label::Keep() : Label::Rewrite(display_[index]);
}

std::vector<std::string> CandidateVocab::Candidates() const {
  return std::vector<std::string>(display_.begin() + 1, display_.end());
}

StudentParams StudentParams::Zeros(size_t feature_dims, size_t hidden_dims,
                                   size_t vocab_size) {
  StudentParams p;
  p.feature_projection = RowMatrix::Zero(feature_dims, hidden_dims);
  p.hidden_bias = Eigen::VectorXd::Zero(hidden_dims);
  p.norm_weights = Eigen::MatrixXd::Zero(hidden_dims, vocab_size);
  p.norm_bias = Eigen::VectorXd::Zero(vocab_size);
  p.nsw_weights = Eigen::VectorXd::Zero(hidden_dims);
  p.nsw_bias = 0.0;
  return p;
}

StudentParams StudentParams::Random(size_t feature_dims, size_t hidden_dims,
                                    size_t vocab_size, uint64_t seed,
                                    double scale) {
  StudentParams p = Zeros(feature_dims, hidden_dims, vocab_size);
  std::mt19937_64 gen(seed);
  FillUniform(&p.feature_projection, gen, scale);
  FillUniform(&p.norm_weights, gen, scale);
  FillUniform(&p.nsw_weights, gen, scale);
  return p;
}

bool StudentParams::AllFinite() const {
  return feature_projection.allFinite() && hidden_bias.allFinite() &&
         norm_weights.allFinite() && norm_bias.allFinite() &&
         nsw_weights.allFinite() && std::isfinite(nsw_bias);
}

void StudentParams::AddScaled(const StudentParams &other, double scale) {
  feature_projection += scale * other.feature_projection;
  hidden_bias += scale * other.hidden_bias;
  norm_weights += scale * other.norm_weights;
  norm_bias += scale * other.norm_bias;
  nsw_weights += scale * other.nsw_weights;
  nsw_bias += scale * other.nsw_bias;
}

void StudentParams::SetZero() {
  feature_projection.setZero();
  hidden_bias.setZero();
  norm_weights.setZero();
  norm_bias.setZero();
  nsw_weights.setZero();
  nsw_bias = 0.0;
}

bool StudentParams::operator==(const StudentParams &other) const {
  auto same = [](const auto &a, const auto &b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
  };
  return same(feature_projection, other.feature_projection) &&
         same(hidden_bias, other.hidden_bias) &&
         same(norm_weights, other.norm_weights) &&
         same(norm_bias, other.norm_bias) &&
         same(nsw_weights, other.nsw_weights) && nsw_bias == other.nsw_bias;
}

StudentOutput Forward(const StudentParams &params,
                      const SparseVector &features) {
  const size_t rows = params.feature_projection.rows();
  if (!features.index.empty() && features.index.back() >= rows) {
    throw ShapeError("feature index " + std::to_string(features.index.back()) +
                     " exceeds projection rows " + std::to_string(rows));
  }
  StudentOutput out;
  Eigen::VectorXd pre = params.hidden_bias;
  for (size_t k = 0; k < features.nnz(); ++k) {
    pre += features.value[k] *
           params.feature_projection.row(features.index[k]).transpose();
  }
  out.hidden = pre.array().tanh().matrix();
  out.norm_logits = params.norm_weights.transpose() * out.hidden +
                    params.norm_bias;
  const double max_logit = out.norm_logits.maxCoeff();
  Eigen::VectorXd e = (out.norm_logits.array() - max_logit).exp().matrix();
  out.norm_dist = e / e.sum();
  out.nsw_logit = params.nsw_weights.dot(out.hidden) + params.nsw_bias;
  out.nsw_prob = Sigmoid(out.nsw_logit);
  return out;
}

LossBreakdown Loss(const StudentParams &params,
                   std::span<const StudentExample> batch, double alpha,
                   double beta) {
  return Evaluate(params, batch, alpha, beta, nullptr);
}

LossBreakdown LossAndGradient(const StudentParams &params,
                              std::span<const StudentExample> batch,
                              double alpha, double beta, StudentParams *grad) {
  return Evaluate(params, batch, alpha, beta, grad);
}

namespace {

void CheckFinite(const LossBreakdown &loss, const StudentParams &grad) {
  if (!std::isfinite(loss.l_norm) || !grad.norm_weights.allFinite() ||
      !grad.norm_bias.allFinite()) {
    throw NumericError("non-finite loss or gradient in the normalization head");
  }
  if (!std::isfinite(loss.l_nsw) || !grad.nsw_weights.allFinite() ||
      !std::isfinite(grad.nsw_bias)) {
    throw NumericError("non-finite loss or gradient in the detection head");
  }
  if (!grad.feature_projection.allFinite() || !grad.hidden_bias.allFinite()) {
    throw NumericError("non-finite gradient in the shared encoder");
  }
}

}  // namespace

LossBreakdown TrainStep(StudentParams *params,
                        std::span<const StudentExample> batch, double alpha,
                        double beta, double learning_rate) {
  if (!(learning_rate >= 0.0)) {
    throw ValidationError("learning rate must be non-negative");
  }
  StudentParams grad;
  LossBreakdown loss = Evaluate(*params, batch, alpha, beta, &grad);
  CheckFinite(loss, grad);
  if (learning_rate > 0.0) params->AddScaled(grad, -learning_rate);
  return loss;
}

AdamOptimizer::AdamOptimizer(AdamConfig config) : config_(config) {
  if (!(config.learning_rate >= 0.0) || !(config.beta1 >= 0.0) ||
      !(config.beta1 < 1.0) || !(config.beta2 >= 0.0) ||
      !(config.beta2 < 1.0) || !(config.epsilon > 0.0)) {
    throw ValidationError("invalid Adam hyperparameters");
  }
}

LossBreakdown AdamOptimizer::Step(StudentParams *params,
                                  std::span<const StudentExample> batch,
                                  double alpha, double beta) {
  StudentParams grad;
  LossBreakdown loss = Evaluate(*params, batch, alpha, beta, &grad);
  CheckFinite(loss, grad);
  if (steps_ == 0 || m_.feature_dims() != params->feature_dims() ||
      m_.hidden_dims() != params->hidden_dims() ||
      m_.vocab_size() != params->vocab_size()) {
    m_ = StudentParams::Zeros(params->feature_dims(), params->hidden_dims(),
                              params->vocab_size());
    v_ = m_;
    steps_ = 0;
  }
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double lr = config_.learning_rate;
  const double m_scale = 1.0 / (1.0 - std::pow(b1, steps_));
  const double v_scale = 1.0 / (1.0 - std::pow(b2, steps_));
  const double eps = config_.epsilon;
  auto update = [&](auto &p, auto &m, auto &v, const auto &g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p -= (lr * (m.array() * m_scale) /
          ((v.array() * v_scale).sqrt() + eps))
             .matrix();
  };
  update(params->feature_projection, m_.feature_projection,
         v_.feature_projection, grad.feature_projection);
  update(params->hidden_bias, m_.hidden_bias, v_.hidden_bias,
         grad.hidden_bias);
  update(params->norm_weights, m_.norm_weights, v_.norm_weights,
         grad.norm_weights);
  update(params->norm_bias, m_.norm_bias, v_.norm_bias, grad.norm_bias);
  update(params->nsw_weights, m_.nsw_weights, v_.nsw_weights,
         grad.nsw_weights);
  m_.nsw_bias = b1 * m_.nsw_bias + (1.0 - b1) * grad.nsw_bias;
  v_.nsw_bias = b2 * v_.nsw_bias + (1.0 - b2) * grad.nsw_bias * grad.nsw_bias;
  params->nsw_bias -= lr * (m_.nsw_bias * m_scale) /
                      (std::sqrt(v_.nsw_bias * v_scale) + eps);
  return loss;
}

}  // namespace lexforge
