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

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lexforge/errors.h"

namespace lexforge {

std::u32string ToCodePoints(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto *bytes = reinterpret_cast<const uint8_t *>(utf8.data());
  const int32_t length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return out;
}

void AppendCodePoint(char32_t cp, std::string *out) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) {
    AppendCodePoint(U'�', out);
    return;
  }
  out->append(reinterpret_cast<const char *>(buf), n);
}

std::string FromCodePoints(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) AppendCodePoint(cp, &out);
  return out;
}

size_t CodePointLength(std::string_view utf8) {
  return ToCodePoints(utf8).size();
}

std::string ToLower(std::string_view utf8) {
  icu::UnicodeString ustr = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  ustr.toLower(icu::Locale::getRoot());
  std::string out;
  ustr.toUTF8String(out);
  return out;
}

bool IsWhitespace(char32_t cp) {
  return u_isUWhiteSpace(static_cast<UChar32>(cp));
}

std::string Trim(std::string_view utf8) {
  std::u32string cps = ToCodePoints(utf8);
  size_t begin = 0;
  size_t end = cps.size();
  while (begin < end && IsWhitespace(cps[begin])) ++begin;
  while (end > begin && IsWhitespace(cps[end - 1])) --end;
  return FromCodePoints(std::u32string_view(cps).substr(begin, end - begin));
}

bool IsPunctuation(char32_t cp) {
  switch (cp) {
    case U'.':
    case U',':
    case U'!':
    case U'?':
    case U':':
    case U';':
    case U'(':
    case U')':
    case U'"':
    case U'\'':
    case U'…':
      return true;
    default:
      return false;
  }
}

bool IsPunctuationString(std::string_view text) {
  std::u32string cps = ToCodePoints(text);
  return !cps.empty() && std::all_of(cps.begin(), cps.end(), IsPunctuation);
}

std::string DebugString(const Label &label) {
  return label.is_keep() ? std::string("<KEEP>") : "\"" + label.target() + "\"";
}

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  const std::u32string cps = ToCodePoints(text);
  size_t i = 0;
  while (i < cps.size()) {
    if (IsWhitespace(cps[i])) {
      ++i;
      continue;
    }
    const bool punct = IsPunctuation(cps[i]);
    size_t j = i + 1;
    while (j < cps.size() && !IsWhitespace(cps[j]) &&
           IsPunctuation(cps[j]) == punct) {
      ++j;
    }
    Token token;
    token.surface = FromCodePoints(std::u32string_view(cps).substr(i, j - i));
    token.char_start = i;
    token.char_end = j;
    token.is_punct = punct;
    tokens.push_back(std::move(token));
    i = j;
  }
  return tokens;
}

std::vector<std::string> Surfaces(const std::vector<Token> &tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token &t : tokens) out.push_back(t.surface);
  return out;
}

std::string StripDiacritics(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfd = icu::Normalizer2::getNFDInstance(status);
  const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU normalizer unavailable");

  icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString decomposed = nfd->normalize(input, status);
  icu::UnicodeString stripped;
  for (int32_t i = 0; i < decomposed.length();) {
    UChar32 c = decomposed.char32At(i);
    i += U16_LENGTH(c);
    if (c >= 0x0300 && c <= 0x036F) continue;
    if (c == 0x0111) c = 'd';
    if (c == 0x0110) c = 'D';
    stripped.append(c);
  }
  icu::UnicodeString composed = nfc->normalize(stripped, status);
  if (U_FAILURE(status)) throw Error("ICU normalization failed");
  std::string out;
  composed.toUTF8String(out);
  return out;
}

std::vector<Token> PerturbSentence(const std::vector<Token> &tokens,
                                   const PerturbConfig &cfg) {
  std::mt19937_64 gen(cfg.seed);
  std::vector<Token> out = tokens;
  for (Token &token : out) {
    if (token.is_punct) continue;
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    if (u < cfg.p) {
      token.surface = StripDiacritics(token.surface);
      token.char_end = token.char_start + CodePointLength(token.surface);
    }
  }
  return out;
}

AlignedSentence PerturbAligned(const AlignedSentence &sentence,
                               const PerturbConfig &cfg) {
  AlignedSentence out;
  out.source_tokens = PerturbSentence(sentence.source_tokens, cfg);
  out.gold_labels.reserve(sentence.gold_labels.size());
  for (size_t i = 0; i < sentence.gold_labels.size(); ++i) {
    const std::string &clean = sentence.source_tokens[i].surface;
    std::string target = sentence.gold_labels[i].Resolve(clean);
    out.gold_labels.push_back(
        Label::For(out.source_tokens[i].surface, std::move(target)));
  }
  return out;
}

double NormalizedEditDistance(std::string_view a, std::string_view b) {
  const std::u32string s = ToCodePoints(a);
  const std::u32string t = ToCodePoints(b);
  const size_t longest = std::max(s.size(), t.size());
  if (longest == 0) return 0.0;
  std::vector<size_t> row(t.size() + 1);
  for (size_t j = 0; j <= t.size(); ++j) row[j] = j;
  for (size_t i = 1; i <= s.size(); ++i) {
    size_t diagonal = row[0];
    row[0] = i;
    for (size_t j = 1; j <= t.size(); ++j) {
      const size_t above = row[j];
      row[j] = std::min({diagonal + (s[i - 1] == t[j - 1] ? 0 : 1),
                         row[j - 1] + 1, above + 1});
      diagonal = above;
    }
  }
  return static_cast<double>(row[t.size()]) / static_cast<double>(longest);
}

namespace {

constexpr double kTieEpsilon = 1e-9;

enum class Op { kSubstitute, kInsert, kDelete };

struct AlignmentTable {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> cost;
  std::vector<double> sub;

  double &at(size_t i, size_t j) { return cost[i * cols + j]; }
  double sub_at(size_t i, size_t j) const { return sub[i * (cols - 1) + j]; }
};

AlignmentTable FillTable(const std::vector<std::string> &source,
                         const std::vector<std::string> &target) {
  AlignmentTable table;
  table.rows = source.size() + 1;
  table.cols = target.size() + 1;
  table.cost.assign(table.rows * table.cols, 0.0);
  table.sub.assign(source.size() * target.size(), 0.0);
  for (size_t i = 0; i < source.size(); ++i) {
    for (size_t j = 0; j < target.size(); ++j) {
      table.sub[i * target.size() + j] =
          NormalizedEditDistance(source[i], target[j]);
    }
  }
  for (size_t i = 0; i < table.rows; ++i) table.at(i, 0) = double(i);
  for (size_t j = 0; j < table.cols; ++j) table.at(0, j) = double(j);
  for (size_t i = 1; i < table.rows; ++i) {
    for (size_t j = 1; j < table.cols; ++j) {
      table.at(i, j) =
          std::min({table.at(i - 1, j - 1) + table.sub_at(i - 1, j - 1),
                    table.at(i, j - 1) + 1.0, table.at(i - 1, j) + 1.0});
    }
  }
  return table;
}

void CheckAlignable(const std::vector<std::string> &source,
                    const std::vector<std::string> &target) {
  if (source.empty() != target.empty()) {
    throw ValidationError(
        "cannot align: exactly one side of the sentence pair is empty");
  }
}

}  // namespace

double AlignmentCost(const std::vector<std::string> &source,
                     const std::vector<std::string> &target) {
  CheckAlignable(source, target);
  if (source.empty()) return 0.0;
  AlignmentTable table = FillTable(source, target);
  return table.at(source.size(), target.size());
}

std::vector<Label> Align(const std::vector<std::string> &source,
                         const std::vector<std::string> &target) {
  CheckAlignable(source, target);
  if (source.empty()) return {};
  AlignmentTable table = FillTable(source, target);

  // Backtrace, preferring substitution, then insertion, then deletion.
  std::vector<Op> ops;
  size_t i = source.size();
  size_t j = target.size();
  while (i > 0 || j > 0) {
    const double here = table.at(i, j);
    if (i > 0 && j > 0 &&
        std::abs(here - (table.at(i - 1, j - 1) + table.sub_at(i - 1, j - 1))) <
            kTieEpsilon) {
      ops.push_back(Op::kSubstitute);
      --i;
      --j;
    } else if (j > 0 && std::abs(here - (table.at(i, j - 1) + 1.0)) <
                            kTieEpsilon) {
      ops.push_back(Op::kInsert);
      --j;
    } else {
      ops.push_back(Op::kDelete);
      --i;
    }
  }
  std::reverse(ops.begin(), ops.end());

  std::vector<std::vector<std::string>> pieces(source.size());
  std::vector<bool> aligned(source.size(), false);
  std::vector<std::string> pending;
  int last_aligned = -1;
  i = 0;
  j = 0;
  for (Op op : ops) {
    switch (op) {
      case Op::kSubstitute:
        aligned[i] = true;
        pieces[i] = std::move(pending);
        pending.clear();
        pieces[i].push_back(target[j]);
        last_aligned = static_cast<int>(i);
        ++i;
        ++j;
        break;
      case Op::kInsert:
        if (last_aligned >= 0) {
          pieces[last_aligned].push_back(target[j]);
        } else {
          pending.push_back(target[j]);
        }
        ++j;
        break;
      case Op::kDelete:
        ++i;
        break;
    }
  }

  std::vector<Label> labels;
  labels.reserve(source.size());
  for (size_t k = 0; k < source.size(); ++k) {
    if (!aligned[k]) {
      labels.push_back(Label::Rewrite(""));
      continue;
    }
    std::string joined;
    for (const std::string &piece : pieces[k]) {
      if (!joined.empty()) joined += ' ';
      joined += piece;
    }
    labels.push_back(Label::For(source[k], std::move(joined)));
  }
  return labels;
}

}  // namespace lexforge
