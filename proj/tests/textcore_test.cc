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

#include "lexforge/textcore.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <limits>
#include <random>
#include <set>

#include "lexforge/errors.h"
#include "test_util.h"

namespace lexforge {
namespace {

std::vector<std::string> Words(const std::vector<Token> &tokens) {
  return Surfaces(tokens);
}

TEST(TokenizeTest, EmptyInput) { EXPECT_TRUE(Tokenize("").empty()); }

TEST(TokenizeTest, SplitsTrailingPunctuation) {
  const std::vector<Token> tokens = Tokenize("chào bạn!");
  EXPECT_EQ(Words(tokens), (std::vector<std::string>{"chào", "bạn", "!"}));
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_FALSE(tokens[0].is_punct);
  EXPECT_FALSE(tokens[1].is_punct);
  EXPECT_TRUE(tokens[2].is_punct);
  EXPECT_EQ(tokens[1].char_start, 5u);
  EXPECT_EQ(tokens[1].char_end, 8u);
}

TEST(TokenizeTest, SplitsInternalPunctuation) {
  EXPECT_EQ(Words(Tokenize("a,b")), (std::vector<std::string>{"a", ",", "b"}));
}

TEST(TokenizeTest, PunctuationRunIsOneToken) {
  EXPECT_EQ(Words(Tokenize("(thật...)")),
            (std::vector<std::string>{"(", "thật", "...)"}));
  EXPECT_EQ(Words(Tokenize("vậy…")), (std::vector<std::string>{"vậy", "…"}));
}

// Independent walk: classify every code point, cut at whitespace and at
// every punctuation/non-punctuation boundary.
std::vector<Token> WalkOracle(const std::u32string &cps) {
  static const std::u32string kPunct = U".,!?:;()\"'…";
  auto cls = [&](char32_t c) {
    if (c == U' ' || c == U'\t' || c == U'\n' || c == U' ' ||
        c == U'　') {
      return 0;
    }
    return kPunct.find(c) != std::u32string::npos ? 1 : 2;
  };
  std::vector<Token> out;
  for (size_t i = 0; i < cps.size(); ++i) {
    const int c = cls(cps[i]);
    if (c == 0) continue;
    if (out.empty() || out.back().char_end != i ||
        (out.back().is_punct ? 1 : 2) != c) {
      Token t;
      t.char_start = i;
      t.char_end = i;
      t.is_punct = c == 1;
      out.push_back(t);
    }
    out.back().char_end = i + 1;
    out.back().surface = FromCodePoints(
        cps.substr(out.back().char_start,
                   out.back().char_end - out.back().char_start));
  }
  return out;
}

TEST(TokenizeTest, MatchesCharacterWalkOracleOnRandomText) {
  const std::u32string alphabet =
      U"abkoz đăâêôơưáàảãạếềểễệ ĐƯ  \t .,!?:;()\"'…";
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::u32string text;
    const size_t len = gen() % 25;
    for (size_t k = 0; k < len; ++k) text += alphabet[gen() % alphabet.size()];
    const std::string utf8 = FromCodePoints(text);
    const std::vector<Token> tokens = Tokenize(utf8);
    EXPECT_EQ(tokens, WalkOracle(text)) << utf8;

    std::string joined;
    std::string squeezed;
    for (size_t k = 0; k < tokens.size(); ++k) {
      const Token &t = tokens[k];
      EXPECT_FALSE(t.surface.empty());
      EXPECT_LT(t.char_start, t.char_end);
      if (k > 0) {
        EXPECT_LE(tokens[k - 1].char_end, t.char_start);
      }
      EXPECT_EQ(t.is_punct, IsPunctuationString(t.surface));
      EXPECT_EQ(FromCodePoints(text.substr(t.char_start,
                                           t.char_end - t.char_start)),
                t.surface);
      joined += t.surface;
    }
    for (char32_t c : text) {
      if (!IsWhitespace(c)) AppendCodePoint(c, &squeezed);
    }
    EXPECT_EQ(joined, squeezed);
  }
}

TEST(StripDiacriticsTest, Examples) {
  EXPECT_EQ(StripDiacritics("tiếng"), "tieng");
  EXPECT_EQ(StripDiacritics("đường"), "duong");
  EXPECT_EQ(StripDiacritics("Đà Nẵng"), "Da Nang");
  EXPECT_EQ(StripDiacritics("hello"), "hello");
  EXPECT_EQ(StripDiacritics(""), "");
}

TEST(StripDiacriticsTest, HandlesDecomposedInput) {
  // "e" followed by combining circumflex and combining acute.
  EXPECT_EQ(StripDiacritics("ti" "e\xCC\x82\xCC\x81" "ng"), "tieng");
}

TEST(StripDiacriticsTest, IdempotentOnRandomStrings) {
  const std::u32string alphabet =
      U"aăâeêioôơuưyđAĂÂĐ̣̀́̃̉ xyz,ñçü";
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::u32string text;
    for (size_t k = gen() % 12; k > 0; --k) {
      text += alphabet[gen() % alphabet.size()];
    }
    const std::string once = StripDiacritics(FromCodePoints(text));
    EXPECT_EQ(StripDiacritics(once), once);
    for (char32_t c : ToCodePoints(once)) {
      EXPECT_FALSE(c >= 0x300 && c <= 0x36F);
      EXPECT_NE(c, U'đ');
      EXPECT_NE(c, U'Đ');
    }
  }
}

std::vector<Token> SentenceTokens(size_t n, uint64_t seed) {
  static const std::vector<std::string> kWords = {
      "tiếng", "việt", "được", "không", "người", "ăn", "cơm", "nhé", "!"};
  std::mt19937_64 gen(seed);
  std::string text;
  for (size_t i = 0; i < n; ++i) {
    if (i) text += ' ';
    text += kWords[gen() % kWords.size()];
  }
  return Tokenize(text);
}

TEST(PerturbTest, ZeroIsIdentity) {
  const std::vector<Token> tokens = Tokenize("tiếng việt");
  EXPECT_EQ(PerturbSentence(tokens, {0.0, 7}), tokens);
}

TEST(PerturbTest, OneStripsEveryWord) {
  const std::vector<Token> out =
      PerturbSentence(Tokenize("tiếng việt"), {1.0, 7});
  EXPECT_EQ(Words(out), (std::vector<std::string>{"tieng", "viet"}));
}

TEST(PerturbTest, OneEqualsMappingStripAndKeepsPunctuation) {
  const std::vector<Token> tokens = SentenceTokens(200, 5);
  const std::vector<Token> out = PerturbSentence(tokens, {1.0, 99});
  ASSERT_EQ(out.size(), tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string expected = tokens[i].is_punct
                                     ? tokens[i].surface
                                     : StripDiacritics(tokens[i].surface);
    EXPECT_EQ(out[i].surface, expected);
    EXPECT_EQ(out[i].char_end - out[i].char_start,
              CodePointLength(out[i].surface));
  }
}

TEST(PerturbTest, HalfRatioWithinBinomialBound) {
  // Tokens that all change when stripped, so the stripped count is exact.
  std::string text;
  for (int i = 0; i < 1000; ++i) text += "tiếng ";
  const std::vector<Token> tokens = Tokenize(text);
  const std::vector<Token> out = PerturbSentence(tokens, {0.5, 7});
  size_t stripped = 0;
  for (size_t i = 0; i < out.size(); ++i) {
    stripped += out[i].surface != tokens[i].surface;
  }
  const double fraction = double(stripped) / out.size();
  EXPECT_GE(fraction, 0.45);
  EXPECT_LE(fraction, 0.55);
}

TEST(PerturbTest, DeterministicPerSeed) {
  const std::vector<Token> tokens = SentenceTokens(100, 1);
  EXPECT_EQ(PerturbSentence(tokens, {0.3, 42}),
            PerturbSentence(tokens, {0.3, 42}));
  EXPECT_NE(PerturbSentence(tokens, {0.3, 42}),
            PerturbSentence(tokens, {0.3, 43}));
}

TEST(PerturbTest, AlignedLabelsStillNameCleanTarget) {
  AlignedSentence s;
  s.source_tokens = Tokenize("ko tiếng việt");
  s.gold_labels = {Label::Rewrite("không"), Label::Keep(), Label::Keep()};
  const AlignedSentence out = PerturbAligned(s, {1.0, 1});
  EXPECT_EQ(Words(out.source_tokens),
            (std::vector<std::string>{"ko", "tieng", "viet"}));
  EXPECT_EQ(out.gold_labels,
            (std::vector<Label>{Label::Rewrite("không"),
                                Label::Rewrite("tiếng"),
                                Label::Rewrite("việt")}));
}

TEST(NormalizedEditDistanceTest, Values) {
  EXPECT_DOUBLE_EQ(NormalizedEditDistance("", ""), 0.0);
  EXPECT_DOUBLE_EQ(NormalizedEditDistance("abc", "abc"), 0.0);
  EXPECT_DOUBLE_EQ(NormalizedEditDistance("ko", "không"), 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(NormalizedEditDistance("", "ab"), 1.0);
  EXPECT_DOUBLE_EQ(NormalizedEditDistance("kitten", "sitting"), 3.0 / 7.0);
}

// Exhaustive oracle over every monotone alignment, i.e. every interleaving of
// substitutions, insertions and deletions.
struct BruteForce {
  double min_cost = std::numeric_limits<double>::infinity();
  std::set<std::vector<std::string>> optimal_outputs;
};

size_t Levenshtein(const std::u32string &a, const std::u32string &b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  std::vector<std::vector<size_t>> d(a.size() + 1,
                                     std::vector<size_t>(b.size() + 1));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
    }
  }
  return d[a.size()][b.size()];
}

double OracleSubCost(const std::string &a, const std::string &b) {
  const std::u32string x = ToCodePoints(a);
  const std::u32string y = ToCodePoints(b);
  const size_t longest = std::max(x.size(), y.size());
  return longest == 0 ? 0.0 : double(Levenshtein(x, y)) / double(longest);
}

// Output string per source token under the stated attachment rules; "\x01"
// marks a deleted token.
std::vector<std::string> Render(const std::vector<std::string> &src,
                                const std::vector<std::string> &tgt,
                                const std::vector<char> &ops) {
  std::vector<std::vector<std::string>> parts(src.size());
  std::vector<bool> aligned(src.size(), false);
  std::vector<std::string> leading;
  int last = -1;
  size_t i = 0;
  size_t j = 0;
  for (char op : ops) {
    if (op == 'S') {
      aligned[i] = true;
      parts[i].push_back(tgt[j]);
      last = int(i);
      ++i;
      ++j;
    } else if (op == 'I') {
      if (last >= 0) {
        parts[last].push_back(tgt[j]);
      } else {
        leading.push_back(tgt[j]);
      }
      ++j;
    } else {
      ++i;
    }
  }
  for (size_t k = 0; k < src.size(); ++k) {
    if (aligned[k]) {
      parts[k].insert(parts[k].begin(), leading.begin(), leading.end());
      break;
    }
  }
  std::vector<std::string> out;
  for (size_t k = 0; k < src.size(); ++k) {
    if (!aligned[k]) {
      out.push_back("\x01");
      continue;
    }
    std::string s;
    for (const std::string &p : parts[k]) s += (s.empty() ? "" : " ") + p;
    out.push_back(s);
  }
  return out;
}

BruteForce Enumerate(const std::vector<std::string> &src,
                     const std::vector<std::string> &tgt) {
  BruteForce result;
  std::vector<std::pair<double, std::vector<char>>> all;
  std::vector<char> ops;
  std::function<void(size_t, size_t, double)> walk = [&](size_t i, size_t j,
                                                         double cost) {
    if (i == src.size() && j == tgt.size()) {
      all.emplace_back(cost, ops);
      return;
    }
    if (i < src.size() && j < tgt.size()) {
      ops.push_back('S');
      walk(i + 1, j + 1, cost + OracleSubCost(src[i], tgt[j]));
      ops.pop_back();
    }
    if (j < tgt.size()) {
      ops.push_back('I');
      walk(i, j + 1, cost + 1.0);
      ops.pop_back();
    }
    if (i < src.size()) {
      ops.push_back('D');
      walk(i + 1, j, cost + 1.0);
      ops.pop_back();
    }
  };
  walk(0, 0, 0.0);
  for (const auto &[cost, seq] : all) {
    result.min_cost = std::min(result.min_cost, cost);
  }
  for (const auto &[cost, seq] : all) {
    if (cost - result.min_cost < 1e-9) {
      result.optimal_outputs.insert(Render(src, tgt, seq));
    }
  }
  return result;
}

std::vector<std::string> Outputs(const std::vector<std::string> &src,
                                 const std::vector<Label> &labels) {
  std::vector<std::string> out;
  for (size_t k = 0; k < src.size(); ++k) {
    if (!labels[k].is_keep() && labels[k].target().empty()) {
      out.push_back("\x01");
    } else {
      out.push_back(labels[k].Resolve(src[k]));
    }
  }
  return out;
}

TEST(AlignTest, Examples) {
  EXPECT_EQ(Align({"xin", "chào"}, {"xin", "chào"}),
            (std::vector<Label>{Label::Keep(), Label::Keep()}));
  EXPECT_EQ(Align({"ko"}, {"không"}),
            (std::vector<Label>{Label::Rewrite("không")}));
  EXPECT_TRUE(Align({}, {}).empty());
}

TEST(AlignTest, KoBikMatchesExhaustiveOracle) {
  const std::vector<std::string> src = {"ko", "bik"};
  const std::vector<std::string> tgt = {"không", "biết"};
  const std::vector<Label> labels = Align(src, tgt);
  EXPECT_EQ(labels, (std::vector<Label>{Label::Rewrite("không"),
                                        Label::Rewrite("biết")}));
  const BruteForce oracle = Enumerate(src, tgt);
  EXPECT_NEAR(AlignmentCost(src, tgt), oracle.min_cost, 1e-12);
  EXPECT_TRUE(oracle.optimal_outputs.count(Outputs(src, labels)));
}

TEST(AlignTest, OneToManyExpansion) {
  EXPECT_EQ(Align({"ny", "đẹp"}, {"người", "yêu", "đẹp"}),
            (std::vector<Label>{Label::Rewrite("người yêu"), Label::Keep()}));
  EXPECT_EQ(Align({"kbh", "quên"}, {"không", "bao", "giờ", "quên"}),
            (std::vector<Label>{Label::Rewrite("không bao giờ"),
                                Label::Keep()}));
}

TEST(AlignTest, LeadingInsertionAttachesToFirstAlignedToken) {
  EXPECT_EQ(Align({"ăn"}, {"đi", "ăn"}),
            (std::vector<Label>{Label::Rewrite("đi ăn")}));
}

TEST(AlignTest, DeletionYieldsEmptyRewrite) {
  EXPECT_EQ(Align({"ăn", "zzzzzz", "cơm"}, {"ăn", "cơm"}),
            (std::vector<Label>{Label::Keep(), Label::Rewrite(""),
                                Label::Keep()}));
}

TEST(AlignTest, OneEmptySideThrows) {
  EXPECT_THROW(Align({"a"}, {}), ValidationError);
  EXPECT_THROW(Align({}, {"a"}), ValidationError);
}

TEST(AlignTest, SelfAlignmentIsAllKeep) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<std::string> s = Words(SentenceTokens(1 + gen() % 9, gen()));
    EXPECT_EQ(Align(s, s), std::vector<Label>(s.size(), Label::Keep()));
  }
}

TEST(AlignTest, AgreesWithBruteForceOnSmallInputs) {
  const std::vector<std::string> vocab = {"ko", "không", "k",  "bik", "biết",
                                          "b",  "ab",    "abc", "đi", "di",
                                          "người", "yêu", "ny"};
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> src(1 + gen() % 5);
    std::vector<std::string> tgt(1 + gen() % 5);
    for (auto &w : src) w = vocab[gen() % vocab.size()];
    for (auto &w : tgt) w = vocab[gen() % vocab.size()];
    const BruteForce oracle = Enumerate(src, tgt);
    EXPECT_NEAR(AlignmentCost(src, tgt), oracle.min_cost, 1e-9);
    const std::vector<Label> labels = Align(src, tgt);
    ASSERT_EQ(labels.size(), src.size());
    EXPECT_TRUE(oracle.optimal_outputs.count(Outputs(src, labels)))
        << "trial " << trial;

    // The non-deleted outputs, in order, spell out the target.
    std::vector<std::string> rebuilt;
    for (size_t k = 0; k < src.size(); ++k) {
      const std::string &out = labels[k].Resolve(src[k]);
      if (!out.empty()) rebuilt.push_back(out);
    }
    std::string joined_target;
    for (const auto &w : tgt) joined_target += (joined_target.empty() ? "" : " ") + w;
    std::string joined_rebuilt;
    for (const auto &w : rebuilt) joined_rebuilt += (joined_rebuilt.empty() ? "" : " ") + w;
    EXPECT_EQ(joined_rebuilt, joined_target);

    for (size_t k = 0; k < src.size(); ++k) {
      if (!labels[k].is_keep()) {
        EXPECT_NE(labels[k].target(), src[k]);
      }
    }
  }
}

TEST(TextUtilTest, LowerTrimAndPunctuation) {
  EXPECT_EQ(ToLower("ĐƯỜNG Ko"), "đường ko");
  EXPECT_EQ(Trim("  \t chào  "), "chào");
  EXPECT_TRUE(IsPunctuationString("…!"));
  EXPECT_FALSE(IsPunctuationString("a!"));
  EXPECT_FALSE(IsPunctuationString(""));
}

TEST(TextUtilTest, Utf8RoundTrip) {
  const std::string s = "Tiếng Việt có dấu… 🙂";
  EXPECT_EQ(FromCodePoints(ToCodePoints(s)), s);
  EXPECT_EQ(CodePointLength("việt"), 4u);
}

TEST(LabelTest, ForEncodesIdentityAsKeep) {
  EXPECT_TRUE(Label::For("ăn", "ăn").is_keep());
  EXPECT_EQ(Label::For("ko", "không"), Label::Rewrite("không"));
  EXPECT_EQ(Label::Keep().Resolve("x"), "x");
  EXPECT_EQ(DebugString(Label::Keep()), "<KEEP>");
}

}  // namespace
}  // namespace lexforge
