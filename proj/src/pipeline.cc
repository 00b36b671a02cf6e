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

#include "lexforge/pipeline.h"

#include <unicode/uchar.h>

#include "lexforge/errors.h"
#include "lexforge/student.h"

namespace lexforge {

std::vector<TokenRecord> PredictTokens(const ModelBundle &model,
                                       const std::vector<Token> &tokens,
                                       double nsw_threshold) {
  if (!(nsw_threshold >= 0.0 && nsw_threshold <= 1.0)) {
    throw ValidationError("nsw threshold must lie in [0, 1]");
  }
  std::vector<TokenRecord> records;
  records.reserve(tokens.size());
  const size_t dims = model.student.feature_dims();
  for (size_t i = 0; i < tokens.size(); ++i) {
    TokenRecord rec;
    rec.source = tokens[i].surface;
    rec.prediction = tokens[i].surface;
    const StudentOutput out = Forward(model.student, FeaturizeAt(tokens, i, dims));
    Eigen::Index best = 0;
    out.norm_dist.maxCoeff(&best);
    const bool argmax_rewrites = best != CandidateVocab::kKeep;
    rec.is_nsw = !tokens[i].is_punct &&
                 (model.detection_head ? out.nsw_prob >= nsw_threshold
                                       : argmax_rewrites);
    if (rec.is_nsw && argmax_rewrites) {
      rec.prediction = model.vocab.display(static_cast<int>(best));
      rec.confidence = out.norm_dist(best);
    } else {
      rec.confidence = out.norm_dist(CandidateVocab::kKeep);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<Label> PredictLabels(const ModelBundle &model,
                                 const std::vector<Token> &tokens,
                                 double nsw_threshold) {
  std::vector<Label> labels;
  for (const TokenRecord &rec : PredictTokens(model, tokens, nsw_threshold)) {
    labels.push_back(Label::For(rec.source, rec.prediction));
  }
  return labels;
}

std::string Postprocess(const std::vector<std::string> &tokens) {
  std::u32string joined;
  for (const std::string &token : tokens) {
    if (token.empty()) continue;
    std::u32string cps = ToCodePoints(token);
    if (!joined.empty() && !IsPunctuation(cps.front())) joined += U' ';
    joined += cps;
  }
  // Tokens with internal spaces may still leave a space before punctuation.
  std::u32string cleaned;
  for (size_t i = 0; i < joined.size(); ++i) {
    if (joined[i] == U' ' && i + 1 < joined.size() &&
        IsPunctuation(joined[i + 1])) {
      continue;
    }
    cleaned += joined[i];
  }
  for (char32_t &cp : cleaned) {
    if (u_isalpha(static_cast<UChar32>(cp))) {
      cp = static_cast<char32_t>(u_toupper(static_cast<UChar32>(cp)));
      break;
    }
  }
  return FromCodePoints(cleaned);
}

NormalizationResult NormalizeSentence(const ModelBundle *model,
                                      std::string_view sentence,
                                      double nsw_threshold) {
  if (model == nullptr) {
    throw Error(
        "no model checkpoint loaded; run `lexforge train` or pass "
        "--checkpoint PATH");
  }
  NormalizationResult result;
  result.tokens = PredictTokens(*model, Tokenize(sentence), nsw_threshold);
  std::vector<std::string> predictions;
  for (const TokenRecord &rec : result.tokens) {
    predictions.push_back(rec.prediction);
  }
  result.normalized = Postprocess(predictions);
  return result;
}

nlohmann::ordered_json ToJson(const NormalizationResult &result) {
  nlohmann::ordered_json j;
  j["normalized"] = result.normalized;
  j["tokens"] = nlohmann::ordered_json::array();
  for (const TokenRecord &rec : result.tokens) {
    j["tokens"].push_back({{"source", rec.source},
                           {"prediction", rec.prediction},
                           {"is_nsw", rec.is_nsw},
                           {"confidence", rec.confidence}});
  }
  return j;
}

Lookup::Lookup(std::shared_ptr<DictionaryStore> store,
               std::shared_ptr<const LlmClient> llm)
    : store_(std::move(store)), llm_(std::move(llm)) {}

std::optional<LookupResult> Lookup::LookupOrFallback(std::string_view word) {
  const std::string key = NormalizeKey(word);
  if (key.empty()) throw ValidationError("empty lookup word");
  for (char32_t cp : ToCodePoints(key)) {
    if (IsWhitespace(cp)) {
      throw ValidationError("lookup expects a single word");
    }
  }
  if (auto hit = store_->Lookup(key)) return LookupResult{*hit, false};
  if (llm_ == nullptr) return std::nullopt;

  std::shared_future<LookupResult> pending;
  std::promise<LookupResult> promise;
  bool leader = false;
  {
    std::lock_guard<std::mutex> lock(inflight_mu_);
    auto it = inflight_.find(key);
    if (it != inflight_.end()) {
      pending = it->second;
    } else {
      pending = promise.get_future().share();
      inflight_.emplace(key, pending);
      leader = true;
    }
  }
  if (!leader) return pending.get();

  try {
    LookupResult result;
    if (auto hit = store_->Lookup(key)) {
      // Another request finished between our miss and taking the lead.
      result = LookupResult{*hit, false};
    } else {
      LlmSuggestion suggestion = llm_->SuggestNormalization(key);
      DictEntry entry = ToDictEntry(suggestion, NowUtc());
      store_->Insert(entry);
      result = LookupResult{std::move(entry), true};
    }
    promise.set_value(result);
    std::lock_guard<std::mutex> lock(inflight_mu_);
    inflight_.erase(key);
    return result;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard<std::mutex> lock(inflight_mu_);
    inflight_.erase(key);
    throw;
  }
}

}  // namespace lexforge
