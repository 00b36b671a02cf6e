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

#ifndef LEXFORGE_WEAKRULES_H_
#define LEXFORGE_WEAKRULES_H_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexforge/dictionary.h"
#include "lexforge/textcore.h"

namespace lexforge {

struct RuleVerdict {
  int rule_id = 0;
  std::optional<std::string> candidate;  // nullopt = abstain

  bool abstains() const { return !candidate.has_value(); }
  bool operator==(const RuleVerdict &) const = default;
};

enum class RuleKind { kDictionary, kRegex };

// A labeling function over one token and its immediate neighbours. Rules
// never throw; a rule that cannot decide abstains.
class WeakRule {
 public:
  virtual ~WeakRule() = default;
  virtual std::optional<std::string> Apply(std::string_view token,
                                           std::string_view left,
                                           std::string_view right) const = 0;
  virtual RuleKind kind() const = 0;
  virtual const std::string &name() const = 0;
};

// Emits the first standard form of the entry keyed by the token.
class DictionaryRule : public WeakRule {
 public:
  DictionaryRule(std::string name, std::shared_ptr<const Dictionary> dict);
  std::optional<std::string> Apply(std::string_view token,
                                   std::string_view left,
                                   std::string_view right) const override;
  RuleKind kind() const override { return RuleKind::kDictionary; }
  const std::string &name() const override { return name_; }

 private:
  std::string name_;
  std::shared_ptr<const Dictionary> dict_;
};

// Restores diacritics: fires when exactly one distinct dictionary standard
// form strips to the token (and differs from it).
class NoDiacriticsRule : public WeakRule {
 public:
  NoDiacriticsRule(std::string name, const Dictionary &dict);
  std::optional<std::string> Apply(std::string_view token,
                                   std::string_view left,
                                   std::string_view right) const override;
  RuleKind kind() const override { return RuleKind::kDictionary; }
  const std::string &name() const override { return name_; }

 private:
  std::string name_;
  // stripped form -> the unique standard form, or nullopt when ambiguous
  std::map<std::string, std::optional<std::string>> index_;
};

// ICU regular expression applied to the lowercased token. On a match the
// whole token is rewritten with `replacement` ($1-style group references).
class RegexRule : public WeakRule {
 public:
  // Throws ValidationError for a pattern ICU cannot compile.
  RegexRule(std::string name, std::string pattern, std::string replacement);
  ~RegexRule() override;
  std::optional<std::string> Apply(std::string_view token,
                                   std::string_view left,
                                   std::string_view right) const override;
  RuleKind kind() const override { return RuleKind::kRegex; }
  const std::string &name() const override { return name_; }
  const std::string &pattern() const { return pattern_; }
  const std::string &replacement() const { return replacement_; }

 private:
  struct Compiled;
  std::string name_;
  std::string pattern_;
  std::string replacement_;
  std::unique_ptr<Compiled> compiled_;
};

// Ordered rules; rule_id is the position in the list.
class RuleSet {
 public:
  RuleSet() = default;
  explicit RuleSet(std::vector<std::shared_ptr<const WeakRule>> rules);

  // One verdict per rule, in rule_id order.
  std::vector<RuleVerdict> Apply(std::string_view token,
                                 std::string_view left_context,
                                 std::string_view right_context) const;

  size_t size() const { return rules_.size(); }
  const WeakRule &rule(size_t id) const { return *rules_[id]; }
  std::vector<std::string> Names() const;

 private:
  std::vector<std::shared_ptr<const WeakRule>> rules_;
};

// Rule config grammar (tab-separated, '#' comments):
//   dict      <name>
//   nodiac    <name>
//   regex     <name>  <pattern>  <replacement>
RuleSet LoadRuleSet(const std::filesystem::path &path,
                    std::shared_ptr<const Dictionary> dict);
RuleSet ParseRuleSet(std::string_view contents, const std::string &source_name,
                     std::shared_ptr<const Dictionary> dict);

// The shipped rules: dictionary, no-diacritics, and the regex rules of
// data/rules/default.rules.
RuleSet DefaultRuleSet(std::shared_ptr<const Dictionary> dict);

struct RuleStats {
  std::string name;
  size_t tokens = 0;
  size_t fired = 0;
  size_t fired_on_changed = 0;
  size_t correct = 0;
  double coverage = 0.0;
  // 1.0 by convention when the rule never fires on a changed token.
  double precision = 1.0;
};

// Throws ValidationError for an empty corpus.
std::vector<RuleStats> RuleCoverage(const RuleSet &rules,
                                    const std::vector<AlignedSentence> &corpus);

}  // namespace lexforge

#endif  // LEXFORGE_WEAKRULES_H_
