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

#ifndef LEXFORGE_PIPELINE_H_
#define LEXFORGE_PIPELINE_H_

#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lexforge/checkpoint.h"
#include "lexforge/dictionary.h"
#include "lexforge/llm_bridge.h"
#include "lexforge/textcore.h"

namespace lexforge {

inline constexpr double kDefaultNswThreshold = 0.5;

struct TokenRecord {
  std::string source;
  std::string prediction;
  bool is_nsw = false;
  // Normalization-head probability of the emitted candidate (KEEP when the
  // token was left alone).
  double confidence = 0.0;
};

struct NormalizationResult {
  std::string normalized;
  std::vector<TokenRecord> tokens;
};

// Per-token decisions. A token is rewritten only when the detection head
// says NSW (nsw_prob >= threshold) and the normalization head's argmax is
// not KEEP. Models trained without the detection loss use argmax != KEEP
// as the NSW signal. Punctuation tokens are always kept.
std::vector<TokenRecord> PredictTokens(const ModelBundle &model,
                                       const std::vector<Token> &tokens,
                                       double nsw_threshold);

std::vector<Label> PredictLabels(const ModelBundle &model,
                                 const std::vector<Token> &tokens,
                                 double nsw_threshold);

// Joins with single spaces, removes spaces before punctuation, and
// uppercases the first alphabetic character. Empty tokens are skipped.
std::string Postprocess(const std::vector<std::string> &tokens);

// Throws Error when `model` is null (no checkpoint loaded).
NormalizationResult NormalizeSentence(const ModelBundle *model,
                                      std::string_view sentence,
                                      double nsw_threshold);

nlohmann::ordered_json ToJson(const NormalizationResult &result);

struct LookupResult {
  DictEntry entry;
  bool was_fallback = false;
};

// Dictionary lookup that falls back to the LLM on a miss and stores the
// answer. Concurrent misses for the same word share one LLM call.
class Lookup {
 public:
  // `llm` may be null, in which case misses stay misses.
  Lookup(std::shared_ptr<DictionaryStore> store,
         std::shared_ptr<const LlmClient> llm);

  // nullopt only for a miss without an LLM client. Throws ValidationError
  // for a blank or multi-word query; LLM errors propagate and leave the
  // dictionary unchanged.
  std::optional<LookupResult> LookupOrFallback(std::string_view word);

  const DictionaryStore &store() const { return *store_; }
  bool has_llm() const { return llm_ != nullptr; }

 private:
  std::shared_ptr<DictionaryStore> store_;
  std::shared_ptr<const LlmClient> llm_;
  std::mutex inflight_mu_;
  std::map<std::string, std::shared_future<LookupResult>> inflight_;
};

}  // namespace lexforge

#endif  // LEXFORGE_PIPELINE_H_
