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

#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>

#include "lexforge/errors.h"
#include "test_util.h"

namespace lexforge {
namespace {

using std::chrono::milliseconds;

LlmSuggestion Suggestion(std::string nsw, std::vector<std::string> forms) {
  LlmSuggestion s;
  s.nsw = std::move(nsw);
  s.standard_forms = std::move(forms);
  s.definition = "phủ định";
  s.examples = {"ko bik"};
  return s;
}

LlmConfig FastConfig(int retries, milliseconds timeout = milliseconds(2000)) {
  LlmConfig config;
  config.max_retries = retries;
  config.timeout = timeout;
  return config;
}

TEST(LlmBridgeTest, MockTableHitEchoesSuggestion) {
  auto mock = std::make_shared<MockLlmTransport>(
      std::vector<LlmSuggestion>{Suggestion("ko", {"không"})});
  LlmClient client(mock, FastConfig(0));
  const LlmSuggestion s = client.SuggestNormalization("ko");
  EXPECT_EQ(s.nsw, "ko");
  EXPECT_EQ(s.standard_forms, std::vector<std::string>{"không"});
  EXPECT_EQ(s.examples, std::vector<std::string>{"ko bik"});
  EXPECT_EQ(mock->calls(), 1);
}

TEST(LlmBridgeTest, NswEchoesTheLowercasedQuery) {
  auto mock = std::make_shared<MockLlmTransport>(
      std::vector<LlmSuggestion>{Suggestion("ko", {"không"})});
  LlmClient client(mock, FastConfig(0));
  EXPECT_EQ(client.SuggestNormalization("  KO ").nsw, "ko");
}

TEST(LlmBridgeTest, EmptyTableIsParseErrorWithoutRetry) {
  auto mock = std::make_shared<MockLlmTransport>();
  LlmClient client(mock, FastConfig(3));
  EXPECT_THROW(client.SuggestNormalization("xyz"), LlmParseError);
  EXPECT_EQ(mock->calls(), 1);
}

TEST(LlmBridgeTest, BlankWordIsValidationError) {
  LlmClient client(std::make_shared<MockLlmTransport>(), FastConfig(0));
  EXPECT_THROW(client.SuggestNormalization(" \t"), ValidationError);
}

TEST(LlmBridgeTest, ConfigInvariantsAreChecked) {
  auto mock = std::make_shared<MockLlmTransport>();
  EXPECT_THROW(LlmClient(mock, FastConfig(-1)), ValidationError);
  EXPECT_THROW(LlmClient(mock, FastConfig(0, milliseconds(0))),
               ValidationError);
}

class RetryTest : public ::testing::TestWithParam<int> {};

TEST_P(RetryTest, SucceedsOnAttemptNPlusOne) {
  const int n = GetParam();
  auto mock = std::make_shared<MockLlmTransport>(
      std::vector<LlmSuggestion>{Suggestion("ko", {"không"})});
  mock->FailNextCalls(n);
  LlmClient client(mock, FastConfig(n));
  EXPECT_EQ(client.SuggestNormalization("ko").standard_forms.front(), "không");
  EXPECT_EQ(mock->calls(), n + 1);
}

TEST_P(RetryTest, OneFailureTooManyIsNetworkError) {
  const int n = GetParam();
  auto mock = std::make_shared<MockLlmTransport>(
      std::vector<LlmSuggestion>{Suggestion("ko", {"không"})});
  mock->FailNextCalls(n + 1);
  LlmClient client(mock, FastConfig(n));
  EXPECT_THROW(client.SuggestNormalization("ko"), LlmNetworkError);
  EXPECT_EQ(mock->calls(), n + 1);
}

INSTANTIATE_TEST_SUITE_P(Retries, RetryTest, ::testing::Values(0, 1, 2, 4));

TEST(LlmBridgeTest, SlowTransportResolvesWithinBound) {
  auto mock = std::make_shared<MockLlmTransport>(
      std::vector<LlmSuggestion>{Suggestion("ko", {"không"})});
  mock->set_delay(milliseconds(2000));
  const milliseconds timeout(100);
  const int retries = 2;
  LlmClient client(mock, FastConfig(retries, timeout));
  const auto start = std::chrono::steady_clock::now();
  EXPECT_THROW(client.SuggestNormalization("ko"), LlmNetworkError);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_LT(elapsed, timeout * (retries + 1) + milliseconds(500));
  EXPECT_EQ(mock->calls(), retries + 1);
}

TEST(LlmBridgeTest, UnreachableEndpointIsNetworkError) {
  LlmConfig config = FastConfig(1, milliseconds(500));
  config.endpoint_url = "http://127.0.0.1:1/v1/chat/completions";
  LlmClient client(std::make_shared<HttpLlmTransport>(config), config);
  EXPECT_THROW(client.SuggestNormalization("ko"), LlmNetworkError);
}

TEST(ParseLlmResponseTest, AcceptsBareAndFencedObjects) {
  const std::string body =
      R"({"standard_forms": ["không"], "definition": "d", "examples": ["e"]})";
  const LlmSuggestion bare = ParseLlmResponse("Ko", body);
  EXPECT_EQ(bare.nsw, "ko");
  EXPECT_EQ(bare.standard_forms, std::vector<std::string>{"không"});
  EXPECT_EQ(ParseLlmResponse("ko", "```json\n" + body + "\n```"), bare);
}

TEST(ParseLlmResponseTest, RejectsFreeTextAndMissingFields) {
  const std::vector<std::string> bad = {
      "ko means không",
      "Sure! {\"standard_forms\": [\"không\"], \"definition\": \"d\", "
      "\"examples\": []}",
      "[\"không\"]",
      R"({"standard_forms": ["không"]})",
      R"({"standard_forms": ["không"], "definition": "d"})",
      R"({"definition": "d", "examples": []})",
      R"({"standard_forms": [], "definition": "d", "examples": []})",
      R"({"standard_forms": ["ko", " "], "definition": "d", "examples": []})",
      R"({"standard_forms": "không", "definition": "d", "examples": []})",
      R"({"standard_forms": [1], "definition": "d", "examples": []})",
      R"({"standard_forms": ["không"], "definition": 3, "examples": []})",
  };
  for (const std::string &content : bad) {
    EXPECT_THROW(ParseLlmResponse("ko", content), LlmParseError) << content;
  }
}

TEST(ParseLlmResponseTest, DropsSelfAndDuplicateForms) {
  const LlmSuggestion s = ParseLlmResponse(
      "ko", R"({"standard_forms": ["ko", " không ", "không", "chẳng"],
               "definition": "d", "examples": []})");
  EXPECT_EQ(s.standard_forms, (std::vector<std::string>{"không", "chẳng"}));
}

TEST(LlmBridgeTest, PromptMentionsWordAndRequiredKeys) {
  const LlmRequest request = BuildLlmRequest(" MLem ");
  EXPECT_EQ(request.word, "mlem");
  EXPECT_NE(request.user_prompt.find("\"mlem\""), std::string::npos);
  for (const char *key : {"standard_forms", "definition", "examples"}) {
    EXPECT_NE(request.user_prompt.find(key), std::string::npos) << key;
  }
}

TEST(LlmBridgeTest, ToDictEntryProducesValidLlmEntry) {
  const Timestamp now(std::chrono::seconds(1767225600));
  const DictEntry entry = ToDictEntry(Suggestion("gato", {"ghen ăn tức ở"}), now);
  EXPECT_EQ(entry.nsw, "gato");
  EXPECT_EQ(entry.source, EntrySource::kLlm);
  EXPECT_EQ(entry.created_at, now);
  EXPECT_NO_THROW(ValidateEntry(entry));
}

TEST(LlmBridgeTest, MockFileLoadsShippedTable) {
  auto mock = MockLlmTransport::FromFile(testing::DataDir() / "llm" /
                                         "mock_table.jsonl");
  LlmClient client(mock, FastConfig(0));
  EXPECT_EQ(client.SuggestNormalization("gato").standard_forms.front(),
            "ghen ăn tức ở");
}

TEST(LlmBridgeTest, ConfigFromEnvironment) {
  unsetenv(kApiKeyEnv);
  unsetenv(kEndpointEnv);
  LlmConfig config;
  EXPECT_FALSE(LlmConfigFromEnv(&config));
  setenv(kApiKeyEnv, "secret", 1);
  setenv(kEndpointEnv, "http://localhost:9/x", 1);
  EXPECT_TRUE(LlmConfigFromEnv(&config));
  EXPECT_EQ(config.api_key, "secret");
  EXPECT_EQ(config.endpoint_url, "http://localhost:9/x");
  unsetenv(kApiKeyEnv);
  unsetenv(kEndpointEnv);
}

}  // namespace
}  // namespace lexforge
