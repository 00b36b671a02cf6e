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

#ifndef LEXFORGE_TEXTCORE_H_
#define LEXFORGE_TEXTCORE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lexforge {

// ---------------------------------------------------------------------------
// UTF-8 helpers. Invalid byte sequences decode to U+FFFD.

std::u32string ToCodePoints(std::string_view utf8);
std::string FromCodePoints(std::u32string_view cps);
void AppendCodePoint(char32_t cp, std::string *out);
size_t CodePointLength(std::string_view utf8);

// Full Unicode lowercasing (root locale).
std::string ToLower(std::string_view utf8);

// Trims Unicode whitespace from both ends.
std::string Trim(std::string_view utf8);

bool IsWhitespace(char32_t cp);

// Membership in the fixed punctuation set {. , ! ? : ; ( ) " ' …}.
bool IsPunctuation(char32_t cp);

// True iff `text` is non-empty and made of punctuation-set characters only.
bool IsPunctuationString(std::string_view text);

// ---------------------------------------------------------------------------

struct Token {
  std::string surface;
  // Code-point offsets into the tokenized text, end exclusive.
  size_t char_start = 0;
  size_t char_end = 0;
  bool is_punct = false;

  bool operator==(const Token &) const = default;
};

// Either KEEP (emit the source token verbatim) or a replacement string. A
// replacement may contain spaces (1-to-many expansion) or be empty (the
// source token is dropped).
class Label {
 public:
  Label() = default;

  static Label Keep() { return Label(); }
  static Label Rewrite(std::string target) {
    Label label;
    label.keep_ = false;
    label.target_ = std::move(target);
    return label;
  }
  // KEEP when target equals the source surface, otherwise a rewrite.
  static Label For(std::string_view source, std::string target) {
    return source == target ? Keep() : Rewrite(std::move(target));
  }

  bool is_keep() const { return keep_; }
  const std::string &target() const { return target_; }

  // Output text for a given source token.
  const std::string &Resolve(const std::string &source) const {
    return keep_ ? source : target_;
  }

  bool operator==(const Label &) const = default;

 private:
  bool keep_ = true;
  std::string target_;
};

std::string DebugString(const Label &label);

struct AlignedSentence {
  std::vector<Token> source_tokens;
  std::vector<Label> gold_labels;
};

struct PerturbConfig {
  double p = 0.0;
  uint64_t seed = 0;
};

// Splits on whitespace, then splits each chunk into maximal runs of
// punctuation and non-punctuation characters.
std::vector<Token> Tokenize(std::string_view text);

std::vector<std::string> Surfaces(const std::vector<Token> &tokens);

// NFD, drop combining marks U+0300..U+036F, NFC, then đ->d and Đ->D.
std::string StripDiacritics(std::string_view text);

// Strips each non-punctuation token independently with probability cfg.p.
// One uniform draw is consumed per non-punctuation token, in order.
std::vector<Token> PerturbSentence(const std::vector<Token> &tokens,
                                   const PerturbConfig &cfg);

// Perturbs the source side of a labeled sentence, re-deriving each gold
// label so it still names the clean target.
AlignedSentence PerturbAligned(const AlignedSentence &sentence,
                               const PerturbConfig &cfg);

// Character-level Levenshtein distance over code points divided by the
// longer length; 0 for two empty strings.
double NormalizedEditDistance(std::string_view a, std::string_view b);

// Monotone DP alignment of source tokens to target tokens. Substitution costs
// NormalizedEditDistance, insertion and deletion cost 1. Inserted target
// tokens are attached to the nearest preceding aligned source token (or the
// first following one). Deleted source tokens get an empty rewrite.
// Throws ValidationError when exactly one side is empty.
std::vector<Label> Align(const std::vector<std::string> &source,
                         const std::vector<std::string> &target);

// Minimum DP cost of the alignment used by Align().
double AlignmentCost(const std::vector<std::string> &source,
                     const std::vector<std::string> &target);

}  // namespace lexforge

#endif  // LEXFORGE_TEXTCORE_H_
