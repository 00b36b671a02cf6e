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

#include "lexforge/weakrules.h"

#include <unicode/regex.h>
#include <unicode/unistr.h>

#include <fstream>
#include <set>
#include <sstream>

#include "lexforge/errors.h"

namespace lexforge {

namespace {

// Kept in sync with data/rules/default.rules (checked by a unit test).
constexpr std::string_view kDefaultRules =
    "# kind\tname\tpattern\treplacement\n"
    "dict\tdictionary\n"
    "nodiac\tno_diacritics\n"
    "regex\trepeat_collapse\t(\\p{L})\\1{2,}$\t$1\n"
    "regex\tkhong_teencode\t^(k+o+|kh|kg|kh?ong|hok|hk|hong|hông|khum|hem)$\t"
    "không\n"
    "regex\tduoc_teencode\t^(dc|đc|dk|đk|dx|đx)$\tđược\n"
    "regex\tw_to_qu\t^w(?=\\p{L})\tqu\n"
    "regex\tf_to_ph\t^f(?=\\p{L})\tph\n"
    "regex\tj_to_gi\t^j(?=\\p{L})\tgi\n"
    "regex\tz_to_v\t^z(?=\\p{L})\tv\n";

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, '\t')) {
    if (!field.empty()) fields.push_back(field);
  }
  return fields;
}

}  // namespace

DictionaryRule::DictionaryRule(std::string name,
                               std::shared_ptr<const Dictionary> dict)
    : name_(std::move(name)), dict_(std::move(dict)) {}

std::optional<std::string> DictionaryRule::Apply(std::string_view token,
                                                 std::string_view,
                                                 std::string_view) const {
  const DictEntry *entry = dict_->Lookup(token);
  if (entry == nullptr) return std::nullopt;
  return entry->standard_forms.front();
}

NoDiacriticsRule::NoDiacriticsRule(std::string name, const Dictionary &dict)
    : name_(std::move(name)) {
  std::set<std::string> forms;
  for (const auto &[key, entry] : dict.entries()) {
    forms.insert(entry.standard_forms.begin(), entry.standard_forms.end());
  }
  for (const std::string &form : forms) {
    std::string stripped = StripDiacritics(form);
    if (stripped == form) continue;
    auto [it, inserted] = index_.try_emplace(stripped, form);
    if (!inserted && it->second != form) it->second.reset();
  }
}

std::optional<std::string> NoDiacriticsRule::Apply(std::string_view token,
                                                   std::string_view,
                                                   std::string_view) const {
  auto it = index_.find(ToLower(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

struct RegexRule::Compiled {
  std::unique_ptr<icu::RegexPattern> pattern;
  icu::UnicodeString replacement;
};

RegexRule::RegexRule(std::string name, std::string pattern,
                     std::string replacement)
    : name_(std::move(name)),
      pattern_(std::move(pattern)),
      replacement_(std::move(replacement)),
      compiled_(std::make_unique<Compiled>()) {
  UErrorCode status = U_ZERO_ERROR;
  UParseError parse_error;
  compiled_->pattern.reset(icu::RegexPattern::compile(
      icu::UnicodeString::fromUTF8(pattern_), 0, parse_error, status));
  if (U_FAILURE(status)) {
    throw ValidationError("rule \"" + name_ + "\": bad pattern at offset " +
                          std::to_string(parse_error.offset) + ": " +
                          u_errorName(status));
  }
  compiled_->replacement = icu::UnicodeString::fromUTF8(replacement_);
}

RegexRule::~RegexRule() = default;

std::optional<std::string> RegexRule::Apply(std::string_view token,
                                            std::string_view,
                                            std::string_view) const {
  const std::string lowered = ToLower(token);
  icu::UnicodeString input = icu::UnicodeString::fromUTF8(lowered);
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::RegexMatcher> matcher(
      compiled_->pattern->matcher(input, status));
  if (U_FAILURE(status) || !matcher->find(status) || U_FAILURE(status)) {
    return std::nullopt;
  }
  matcher->reset();
  icu::UnicodeString rewritten =
      matcher->replaceAll(compiled_->replacement, status);
  if (U_FAILURE(status)) return std::nullopt;
  std::string out;
  rewritten.toUTF8String(out);
  if (out.empty() || out == lowered) return std::nullopt;
  return out;
}

RuleSet::RuleSet(std::vector<std::shared_ptr<const WeakRule>> rules)
    : rules_(std::move(rules)) {}

std::vector<RuleVerdict> RuleSet::Apply(std::string_view token,
                                        std::string_view left_context,
                                        std::string_view right_context) const {
  std::vector<RuleVerdict> verdicts;
  verdicts.reserve(rules_.size());
  for (size_t id = 0; id < rules_.size(); ++id) {
    verdicts.push_back(
        {static_cast<int>(id),
         rules_[id]->Apply(token, left_context, right_context)});
  }
  return verdicts;
}

std::vector<std::string> RuleSet::Names() const {
  std::vector<std::string> names;
  for (const auto &rule : rules_) names.push_back(rule->name());
  return names;
}

RuleSet ParseRuleSet(std::string_view contents, const std::string &source_name,
                     std::shared_ptr<const Dictionary> dict) {
  std::vector<std::shared_ptr<const WeakRule>> rules;
  std::set<std::string> names;
  std::istringstream in{std::string(contents)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = SplitTabs(line);
    if (fields.empty()) continue;
    const std::string &kind = fields[0];
    if (fields.size() < 2) {
      throw ParseError(source_name, line_no, "rule has no name");
    }
    const std::string &name = fields[1];
    if (!names.insert(name).second) {
      throw ParseError(source_name, line_no, "duplicate rule \"" + name + "\"");
    }
    if (kind == "dict" && fields.size() == 2) {
      rules.push_back(std::make_shared<DictionaryRule>(name, dict));
    } else if (kind == "nodiac" && fields.size() == 2) {
      rules.push_back(std::make_shared<NoDiacriticsRule>(name, *dict));
    } else if (kind == "regex" && fields.size() == 4) {
      try {
        rules.push_back(
            std::make_shared<RegexRule>(name, fields[2], fields[3]));
      } catch (const ValidationError &e) {
        throw ParseError(source_name, line_no, e.what());
      }
    } else {
      throw ParseError(source_name, line_no,
                       "expected 'dict NAME', 'nodiac NAME' or "
                       "'regex NAME PATTERN REPLACEMENT'");
    }
  }
  if (rules.empty()) throw ParseError(source_name, 0, "rule set is empty");
  return RuleSet(std::move(rules));
}

RuleSet LoadRuleSet(const std::filesystem::path &path,
                    std::shared_ptr<const Dictionary> dict) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rule file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseRuleSet(buffer.str(), path.string(), std::move(dict));
}

RuleSet DefaultRuleSet(std::shared_ptr<const Dictionary> dict) {
  return ParseRuleSet(kDefaultRules, "<default rules>", std::move(dict));
}

std::vector<RuleStats> RuleCoverage(
    const RuleSet &rules, const std::vector<AlignedSentence> &corpus) {
  std::vector<RuleStats> stats(rules.size());
  for (size_t id = 0; id < rules.size(); ++id) {
    stats[id].name = rules.rule(id).name();
  }
  size_t total = 0;
  for (const AlignedSentence &sentence : corpus) {
    const auto &tokens = sentence.source_tokens;
    for (size_t i = 0; i < tokens.size(); ++i) {
      ++total;
      const std::string_view left = i > 0 ? tokens[i - 1].surface : "";
      const std::string_view right =
          i + 1 < tokens.size() ? tokens[i + 1].surface : "";
      const Label &gold = sentence.gold_labels[i];
      for (const RuleVerdict &v : rules.Apply(tokens[i].surface, left, right)) {
        if (v.abstains()) continue;
        RuleStats &s = stats[v.rule_id];
        ++s.fired;
        if (gold.is_keep()) continue;
        ++s.fired_on_changed;
        if (*v.candidate == gold.target()) ++s.correct;
      }
    }
  }
  if (total == 0) throw ValidationError("rule coverage needs a non-empty corpus");
  for (RuleStats &s : stats) {
    s.tokens = total;
    s.coverage = static_cast<double>(s.fired) / static_cast<double>(total);
    s.precision = s.fired_on_changed == 0
                      ? 1.0
                      : static_cast<double>(s.correct) /
                            static_cast<double>(s.fired_on_changed);
  }
  return stats;
}

}  // namespace lexforge
