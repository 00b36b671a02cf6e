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

#ifndef LEXFORGE_LLM_BRIDGE_H_
#define LEXFORGE_LLM_BRIDGE_H_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "lexforge/dictionary.h"
#include "lexforge/errors.h"

namespace lexforge {

// The transport could not produce a response (connection, HTTP status,
// timeout) after all retries.
class LlmNetworkError : public Error {
 public:
  using Error::Error;
};

// A response arrived but does not carry a usable suggestion.
class LlmParseError : public Error {
 public:
  using Error::Error;
};

struct LlmSuggestion {
  std::string nsw;
  std::vector<std::string> standard_forms;
  std::string definition;
  std::vector<std::string> examples;

  bool operator==(const LlmSuggestion &) const = default;
};

struct LlmConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string api_key;
  std::string model_name = "gpt-4o";
  std::chrono::milliseconds timeout{20000};
  int max_retries = 2;
};

inline constexpr const char *kApiKeyEnv = "LEXFORGE_LLM_API_KEY";
inline constexpr const char *kEndpointEnv = "LEXFORGE_LLM_ENDPOINT";

// Reads the API key and (optionally) the endpoint from the environment.
// Returns false when no API key is set.
bool LlmConfigFromEnv(LlmConfig *config);

struct LlmRequest {
  std::string word;  // lowercased query
  std::string system_prompt;
  std::string user_prompt;
};

// The fixed prompt sent for `word`; see docs/llm_prompt.md.
LlmRequest BuildLlmRequest(std::string_view word);

// Moves one request to a model and returns the raw assistant message text.
// Throws LlmNetworkError on transport failure.
class LlmTransport {
 public:
  virtual ~LlmTransport() = default;
  virtual std::string Send(const LlmRequest &request,
                           std::chrono::milliseconds timeout) = 0;
};

// Chat-completion style JSON POST over HTTP(S).
class HttpLlmTransport : public LlmTransport {
 public:
  explicit HttpLlmTransport(LlmConfig config);
  std::string Send(const LlmRequest &request,
                   std::chrono::milliseconds timeout) override;

 private:
  LlmConfig config_;
};

// Deterministic stand-in that answers from a table of suggestions.
class MockLlmTransport : public LlmTransport {
 public:
  MockLlmTransport() = default;
  explicit MockLlmTransport(std::vector<LlmSuggestion> table);

  // Table file: one JSON object per line with nsw, standard_forms,
  // definition, examples.
  static std::shared_ptr<MockLlmTransport> FromFile(
      const std::filesystem::path &path);

  std::string Send(const LlmRequest &request,
                   std::chrono::milliseconds timeout) override;

  // The next `n` calls throw LlmNetworkError.
  void FailNextCalls(int n) { fail_remaining_ = n; }
  // Every call sleeps this long before answering.
  void set_delay(std::chrono::milliseconds delay) { delay_ms_ = delay.count(); }

  int calls() const { return calls_; }

 private:
  std::map<std::string, LlmSuggestion> table_;
  std::atomic<int> fail_remaining_{0};
  std::atomic<long> delay_ms_{0};
  std::atomic<int> calls_{0};
};

// Validates a model response. Accepts a bare JSON object or one wrapped in a
// ```json fence. standard_forms, definition and examples are all required and
// at least one standard form must differ from the word. The returned nsw is
// always `word`.
LlmSuggestion ParseLlmResponse(std::string_view word, std::string_view content);

// Retrying client shared by every caller. Each attempt is bounded by
// config.timeout, so a call never takes longer than
// timeout * (max_retries + 1) plus scheduling slack.
class LlmClient {
 public:
  LlmClient(std::shared_ptr<LlmTransport> transport, LlmConfig config);

  // Throws ValidationError for a blank word, LlmNetworkError when every
  // attempt failed, LlmParseError for an unusable response.
  LlmSuggestion SuggestNormalization(std::string_view word) const;

  const LlmConfig &config() const { return config_; }

 private:
  std::shared_ptr<LlmTransport> transport_;
  LlmConfig config_;
};

DictEntry ToDictEntry(const LlmSuggestion &suggestion, Timestamp created_at);

}  // namespace lexforge

#endif  // LEXFORGE_LLM_BRIDGE_H_
