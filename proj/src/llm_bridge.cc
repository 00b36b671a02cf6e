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

#include "lexforge/llm_bridge.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "lexforge/textcore.h"

namespace lexforge {

namespace {

constexpr const char *kSystemPrompt =
    "You are a lexicographer for Vietnamese social-media language. You "
    "explain non-standard words (abbreviations, teencode, misspellings, "
    "words typed without diacritics). Reply with one JSON object and nothing "
    "else.";

constexpr const char *kUserPromptTemplate =
    "Non-standard word: \"{word}\"\n"
    "Return a JSON object with exactly these keys:\n"
    "  \"standard_forms\": array of one or more standard Vietnamese words or "
    "phrases this word stands for, most likely first;\n"
    "  \"definition\": one sentence explaining the meaning, in Vietnamese;\n"
    "  \"examples\": array of at least one short social-media style sentence "
    "that uses the non-standard word.\n"
    "If you do not recognize the word, return "
    "{\"standard_forms\": [], \"definition\": \"\", \"examples\": []}.";

std::vector<std::string> StringArrayField(const nlohmann::json &obj,
                                             const char *field) {
  std::vector<std::string> out;
  const auto &value = obj[field];
  if (!value.is_array()) {
    throw LlmParseError(std::string("response field \"") + field +
                        "\" is not an array");
  }
  for (const auto &item : value) {
    if (!item.is_string()) {
      throw LlmParseError(std::string("response field \"") + field +
                          "\" holds a non-string");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::string_view StripCodeFence(std::string_view content) {
  auto first = content.find('{');
  auto last = content.rfind('}');
  if (first == std::string_view::npos || last == std::string_view::npos ||
      last < first) {
    return content;
  }
  // Only unwrap markdown fences; any other prose around the object is
  // rejected by the parser below.
  std::string_view prefix = content.substr(0, first);
  std::string_view suffix = content.substr(last + 1);
  auto is_fence = [](std::string_view s) {
    for (char c : s) {
      if (c != '`' && c != ' ' && c != '\n' && c != '\r' && c != '\t' &&
          std::string_view("json").find(c) == std::string_view::npos) {
        return false;
      }
    }
    return true;
  };
  if (is_fence(prefix) && is_fence(suffix)) {
    return content.substr(first, last - first + 1);
  }
  return content;
}

}  // namespace

bool LlmConfigFromEnv(LlmConfig *config) {
  if (const char *endpoint = std::getenv(kEndpointEnv);
      endpoint != nullptr && *endpoint != '\0') {
    config->endpoint_url = endpoint;
  }
  const char *key = std::getenv(kApiKeyEnv);
  if (key == nullptr || *key == '\0') return false;
  config->api_key = key;
  return true;
}

LlmRequest BuildLlmRequest(std::string_view word) {
  LlmRequest request;
  request.word = NormalizeKey(word);
  request.system_prompt = kSystemPrompt;
  std::string user = kUserPromptTemplate;
  user.replace(user.find("{word}"), 6, request.word);
  request.user_prompt = std::move(user);
  return request;
}

HttpLlmTransport::HttpLlmTransport(LlmConfig config)
    : config_(std::move(config)) {}

std::string HttpLlmTransport::Send(const LlmRequest &request,
                                   std::chrono::milliseconds timeout) {
  const std::string &url = config_.endpoint_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw LlmNetworkError("endpoint URL has no scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  if (!client.is_valid()) {
    throw LlmNetworkError("unsupported endpoint " + origin);
  }
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  nlohmann::json body = {
      {"model", config_.model_name},
      {"temperature", 0},
      {"response_format", {{"type", "json_object"}}},
      {"messages",
       {{{"role", "system"}, {"content", request.system_prompt}},
        {{"role", "user"}, {"content", request.user_prompt}}}}};
  httplib::Headers headers = {
      {"Authorization", "Bearer " + config_.api_key}};
  auto result = client.Post(path, headers, body.dump(), "application/json");
  if (!result) {
    throw LlmNetworkError("request to " + origin + " failed: " +
                          httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw LlmNetworkError("endpoint returned HTTP " +
                          std::to_string(result->status));
  }
  try {
    auto reply = nlohmann::json::parse(result->body);
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception &e) {
    throw LlmParseError(std::string("malformed chat-completion reply: ") +
                        e.what());
  }
}

MockLlmTransport::MockLlmTransport(std::vector<LlmSuggestion> table) {
  for (auto &s : table) {
    std::string key = NormalizeKey(s.nsw);
    table_.insert_or_assign(std::move(key), std::move(s));
  }
}

std::shared_ptr<MockLlmTransport> MockLlmTransport::FromFile(
    const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mock LLM table " + path.string());
  std::vector<LlmSuggestion> table;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos ||
        line[0] == '#') {
      continue;
    }
    try {
      auto j = nlohmann::json::parse(line);
      LlmSuggestion s;
      s.nsw = j.at("nsw").get<std::string>();
      s.standard_forms = j.at("standard_forms").get<std::vector<std::string>>();
      s.definition = j.at("definition").get<std::string>();
      s.examples = j.at("examples").get<std::vector<std::string>>();
      table.push_back(std::move(s));
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return std::make_shared<MockLlmTransport>(std::move(table));
}

std::string MockLlmTransport::Send(const LlmRequest &request,
                                   std::chrono::milliseconds) {
  ++calls_;
  if (long delay = delay_ms_.load(); delay > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(delay));
  }
  int remaining = fail_remaining_.load();
  while (remaining > 0 &&
         !fail_remaining_.compare_exchange_weak(remaining, remaining - 1)) {
  }
  if (remaining > 0) throw LlmNetworkError("mock transport: injected failure");

  auto it = table_.find(request.word);
  if (it == table_.end()) {
    return R"({"standard_forms": [], "definition": "", "examples": []})";
  }
  nlohmann::json j = {{"standard_forms", it->second.standard_forms},
                      {"definition", it->second.definition},
                      {"examples", it->second.examples}};
  return j.dump();
}

LlmSuggestion ParseLlmResponse(std::string_view word,
                               std::string_view content) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(StripCodeFence(content));
  } catch (const nlohmann::json::parse_error &) {
    throw LlmParseError("response is not a JSON object");
  }
  if (!j.is_object()) throw LlmParseError("response is not a JSON object");
  for (const char *field : {"standard_forms", "definition", "examples"}) {
    if (!j.contains(field)) {
      throw LlmParseError(std::string("response lacks \"") + field + "\"");
    }
  }
  LlmSuggestion suggestion;
  suggestion.nsw = NormalizeKey(word);
  for (std::string &form : StringArrayField(j, "standard_forms")) {
    form = Trim(form);
    if (form.empty() || form == suggestion.nsw) continue;
    if (std::find(suggestion.standard_forms.begin(),
                  suggestion.standard_forms.end(),
                  form) != suggestion.standard_forms.end()) {
      continue;
    }
    suggestion.standard_forms.push_back(std::move(form));
  }
  if (suggestion.standard_forms.empty()) {
    throw LlmParseError("no usable standard form for \"" + suggestion.nsw +
                        "\"");
  }
  if (!j["definition"].is_string()) {
    throw LlmParseError("response field \"definition\" is not a string");
  }
  suggestion.definition = j["definition"].get<std::string>();
  suggestion.examples = StringArrayField(j, "examples");
  return suggestion;
}

LlmClient::LlmClient(std::shared_ptr<LlmTransport> transport, LlmConfig config)
    : transport_(std::move(transport)), config_(std::move(config)) {
  if (config_.timeout <= std::chrono::milliseconds::zero()) {
    throw ValidationError("LLM timeout must be positive");
  }
  if (config_.max_retries < 0) {
    throw ValidationError("LLM max_retries must be non-negative");
  }
}

LlmSuggestion LlmClient::SuggestNormalization(std::string_view word) const {
  if (NormalizeKey(word).empty()) {
    throw ValidationError("cannot look up an empty word");
  }
  const LlmRequest request = BuildLlmRequest(word);
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    // Each attempt runs on its own detached thread so a stuck transport
    // cannot hold the caller past the timeout.
    auto promise = std::make_shared<std::promise<std::string>>();
    std::future<std::string> reply = promise->get_future();
    std::thread([transport = transport_, request, promise,
                 timeout = config_.timeout] {
      try {
        promise->set_value(transport->Send(request, timeout));
      } catch (...) {
        promise->set_exception(std::current_exception());
      }
    }).detach();

    if (reply.wait_for(config_.timeout) != std::future_status::ready) {
      last_error = "timed out after " +
                   std::to_string(config_.timeout.count()) + " ms";
      continue;
    }
    std::string content;
    try {
      content = reply.get();
    } catch (const LlmNetworkError &e) {
      last_error = e.what();
      continue;
    }
    return ParseLlmResponse(request.word, content);
  }
  throw LlmNetworkError("LLM request for \"" + request.word + "\" failed after " +
                        std::to_string(config_.max_retries + 1) +
                        " attempt(s): " + last_error);
}

DictEntry ToDictEntry(const LlmSuggestion &suggestion, Timestamp created_at) {
  DictEntry entry;
  entry.nsw = NormalizeKey(suggestion.nsw);
  entry.standard_forms = suggestion.standard_forms;
  entry.definition = suggestion.definition;
  entry.examples = suggestion.examples;
  entry.source = EntrySource::kLlm;
  entry.created_at = created_at;
  ValidateEntry(entry);
  return entry;
}

}  // namespace lexforge
