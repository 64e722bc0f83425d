// Copyright 2026 The selfalign Authors.
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

#ifndef SELFALIGN_LLM_CLIENT_H_
#define SELFALIGN_LLM_CLIENT_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "selfalign/envs.h"
#include "selfalign/oracle.h"

namespace selfalign {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
};

struct ChatResponse {
  std::string content;
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
};

// Carries one chat-completions exchange. Throws OracleError on failure.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual ChatResponse Complete(const ChatRequest& request) = 0;
};

// JSON request/response bodies of a chat-completions endpoint.
std::string ChatRequestToJson(const ChatRequest& request);
ChatResponse ChatResponseFromJson(const std::string& body);

struct HttpEndpoint {
  // e.g. "http://127.0.0.1:8080/v1/chat/completions"
  std::string url;
  // Empty disables the Authorization header.
  std::string api_key;
  int timeout_seconds = 120;
};

// Throws ConfigError when the URL does not parse.
std::unique_ptr<ChatTransport> MakeHttpTransport(const HttpEndpoint& endpoint);

struct LlmOracleConfig {
  std::string model = "gpt-4";
  double temperature = 0.0;
};

// Sends the shipped ranking and reflection prompts through a transport and
// parses the replies, retrying once on a parse failure.
class LlmOracle : public Oracle {
 public:
  LlmOracle(EnvSpec env, std::shared_ptr<ChatTransport> transport, LlmOracleConfig config);

  OracleRanking Rank(std::span<const Trajectory> batch, const RewardSpec& spec,
                     const ParamVector& params, std::uint64_t seed) override;
  OracleReflection Reflect(std::span<const Trajectory> batch, const RewardSpec& spec,
                           const ParamVector& params, std::uint64_t seed) override;
  std::uint64_t tokens_used() const override { return tokens_.load(); }

  std::string RankingPrompt(std::span<const Trajectory> batch, const RewardSpec& spec,
                            const ParamVector& params) const;
  std::string ReflectionPrompt(std::span<const Trajectory> batch, const RewardSpec& spec,
                               const ParamVector& params) const;

 private:
  ChatResponse Send(const std::string& user_prompt);

  EnvSpec env_;
  std::shared_ptr<ChatTransport> transport_;
  LlmOracleConfig config_;
  std::atomic<std::uint64_t> tokens_{0};
};

}  // namespace selfalign

#endif  // SELFALIGN_LLM_CLIENT_H_
