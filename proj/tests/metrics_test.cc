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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lexforge/errors.h"
#include "test_util.h"

namespace lexforge {
namespace {

AlignedSentence Gold(std::vector<Label> labels) {
  AlignedSentence s;
  for (size_t i = 0; i < labels.size(); ++i) {
    Token t;
    t.surface = "w" + std::to_string(i);
    s.source_tokens.push_back(t);
  }
  s.gold_labels = std::move(labels);
  return s;
}

// Position-by-position recount, written independently of Evaluate.
struct Recount {
  double precision, recall, f1, integrity, accuracy;
};

Recount BruteForce(const std::vector<AlignedSentence> &gold,
                   const std::vector<std::vector<Label>> &pred) {
  int gold_changed = 0, pred_changed = 0, correct = 0, keep = 0, kept = 0,
      exact = 0;
  for (size_t s = 0; s < gold.size(); ++s) {
    bool all_equal = true;
    for (size_t i = 0; i < gold[s].gold_labels.size(); ++i) {
      const Label &g = gold[s].gold_labels[i];
      const Label &p = pred[s][i];
      if (!(g == p)) all_equal = false;
      if (!g.is_keep()) ++gold_changed;
      if (!p.is_keep()) ++pred_changed;
      if (!g.is_keep() && !p.is_keep() && g.target() == p.target()) ++correct;
      if (g.is_keep()) {
        ++keep;
        if (p.is_keep()) ++kept;
      }
    }
    if (all_equal) ++exact;
  }
  Recount r;
  r.precision = pred_changed ? double(correct) / pred_changed : 0.0;
  r.recall = gold_changed ? double(correct) / gold_changed : 0.0;
  r.f1 = r.precision + r.recall > 0
             ? 2 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  r.integrity = keep ? double(kept) / keep : 1.0;
  r.accuracy = gold.empty() ? 0.0 : double(exact) / gold.size();
  return r;
}

Label RandomLabel(std::mt19937_64 &gen) {
  static const std::vector<std::string> kTargets = {"không", "được", "biết",
                                                    "Không", "khong", ""};
  if (gen() % 2 == 0) return Label::Keep();
  return Label::Rewrite(kTargets[gen() % kTargets.size()]);
}

TEST(MetricsTest, PerfectPrediction) {
  const std::vector<AlignedSentence> gold = {
      Gold({Label::Keep(), Label::Rewrite("không")}),
      Gold({Label::Rewrite("biết")})};
  const MetricsReport r =
      Evaluate(gold, {gold[0].gold_labels, gold[1].gold_labels});
  EXPECT_EQ(r.f1, 1.0);
  EXPECT_EQ(r.integrity, 1.0);
  EXPECT_EQ(r.accuracy, 1.0);
}

TEST(MetricsTest, HandEnumeratedExample) {
  const std::vector<AlignedSentence> gold = {
      Gold({Label::Keep(), Label::Rewrite("không"), Label::Keep(),
            Label::Rewrite("biết")})};
  const std::vector<std::vector<Label>> pred = {
      {Label::Keep(), Label::Rewrite("không"), Label::Rewrite("đã"),
       Label::Keep()}};
  const MetricsReport r = Evaluate(gold, pred);
  EXPECT_EQ(r.precision, 0.5);
  EXPECT_EQ(r.recall, 0.5);
  EXPECT_EQ(r.f1, 0.5);
  EXPECT_EQ(r.integrity, 0.5);
  EXPECT_EQ(r.accuracy, 0.0);
  EXPECT_EQ(r.gold_changed, 2u);
  EXPECT_EQ(r.predicted_changed, 2u);
  EXPECT_EQ(r.correct_changed, 1u);
  EXPECT_EQ(r.gold_keep, 2u);
  EXPECT_EQ(r.kept, 1u);
}

TEST(MetricsTest, AllKeepPredictor) {
  const std::vector<AlignedSentence> gold = {
      Gold({Label::Keep(), Label::Rewrite("không"), Label::Keep()})};
  const MetricsReport r =
      Evaluate(gold, {{Label::Keep(), Label::Keep(), Label::Keep()}});
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.f1, 0.0);
  EXPECT_EQ(r.integrity, 1.0);
}

TEST(MetricsTest, CaseAndDiacriticsSensitive) {
  const std::vector<AlignedSentence> gold = {
      Gold({Label::Rewrite("không"), Label::Rewrite("không")})};
  const MetricsReport r = Evaluate(
      gold, {{Label::Rewrite("Không"), Label::Rewrite("khong")}});
  EXPECT_EQ(r.correct_changed, 0u);
}

TEST(MetricsTest, ShapeMismatchNamesSentence) {
  const std::vector<AlignedSentence> gold = {Gold({Label::Keep()}),
                                             Gold({Label::Keep()})};
  try {
    Evaluate(gold, {{Label::Keep()}, {Label::Keep(), Label::Keep()}});
    FAIL() << "expected ShapeError";
  } catch (const ShapeError &e) {
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
  }
  EXPECT_THROW(Evaluate(gold, {{Label::Keep()}}), ShapeError);
}

TEST(MetricsTest, AgreesWithBruteForceOnRandomCorpora) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<AlignedSentence> gold;
    std::vector<std::vector<Label>> pred;
    const size_t sentences = 1 + gen() % 10;
    for (size_t s = 0; s < sentences; ++s) {
      const size_t n = 1 + gen() % 8;
      std::vector<Label> g, p;
      for (size_t i = 0; i < n; ++i) {
        g.push_back(RandomLabel(gen));
        p.push_back(gen() % 3 == 0 ? g.back() : RandomLabel(gen));
      }
      gold.push_back(Gold(g));
      pred.push_back(p);
    }
    const MetricsReport r = Evaluate(gold, pred);
    const Recount want = BruteForce(gold, pred);
    EXPECT_DOUBLE_EQ(r.precision, want.precision);
    EXPECT_DOUBLE_EQ(r.recall, want.recall);
    EXPECT_DOUBLE_EQ(r.f1, want.f1);
    EXPECT_DOUBLE_EQ(r.integrity, want.integrity);
    EXPECT_DOUBLE_EQ(r.accuracy, want.accuracy);
    for (double x : {r.precision, r.recall, r.f1, r.integrity, r.accuracy}) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
    EXPECT_EQ(r.sentences, sentences);

    // Permuting sentence order changes nothing.
    std::vector<size_t> order(sentences);
    for (size_t i = 0; i < sentences; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), gen);
    std::vector<AlignedSentence> gold_p;
    std::vector<std::vector<Label>> pred_p;
    for (size_t i : order) {
      gold_p.push_back(gold[i]);
      pred_p.push_back(pred[i]);
    }
    const MetricsReport q = Evaluate(gold_p, pred_p);
    EXPECT_EQ(q.f1, r.f1);
    EXPECT_EQ(q.precision, r.precision);
    EXPECT_EQ(q.recall, r.recall);
    EXPECT_EQ(q.integrity, r.integrity);
    EXPECT_EQ(q.accuracy, r.accuracy);
  }
}

TEST(MetricsTest, JsonCarriesScoresAndCounts) {
  const std::vector<AlignedSentence> gold = {
      Gold({Label::Keep(), Label::Rewrite("không")})};
  const auto j = ToJson(Evaluate(gold, {gold[0].gold_labels}));
  EXPECT_EQ(j["f1"], 1.0);
  EXPECT_EQ(j["counts"]["gold_changed"], 1);
  EXPECT_EQ(j["counts"]["sentences"], 1);
}

}  // namespace
}  // namespace lexforge
