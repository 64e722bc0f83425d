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

#include "selfalign/llm_client.h"

#include <regex>

#include <fmt/format.h>

#include "httplib.h"
#include "json.hpp"
#include "selfalign/errors.h"
#include "selfalign/prompts.h"

namespace selfalign {

using nlohmann::json;

std::string ChatRequestToJson(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  return json{{"model", request.model},
              {"messages", messages},
              {"temperature", request.temperature}}
      .dump();
}

ChatResponse ChatResponseFromJson(const std::string& body) {
  try {
    const json j = json::parse(body);
    ChatResponse r;
    r.content = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (j.contains("usage")) {
      const json& u = j.at("usage");
      r.prompt_tokens = u.value("prompt_tokens", std::uint64_t{0});
      r.completion_tokens = u.value("completion_tokens", std::uint64_t{0});
    }
    return r;
  } catch (const json::exception& e) {
    throw OracleError(fmt::format("malformed chat response: {}", e.what()));
  }
}

namespace {

class HttpTransport : public ChatTransport {
 public:
  HttpTransport(std::string base, std::string path, HttpEndpoint endpoint)
      : base_(std::move(base)), path_(std::move(path)), endpoint_(std::move(endpoint)) {}

  ChatResponse Complete(const ChatRequest& request) override {
    httplib::Client client(base_);
    client.set_connection_timeout(endpoint_.timeout_seconds, 0);
    client.set_read_timeout(endpoint_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!endpoint_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + endpoint_.api_key);
    }
    auto res = client.Post(path_, headers, ChatRequestToJson(request), "application/json");
    if (!res) {
      throw OracleError(fmt::format("request to {}{} failed: {}", base_, path_,
                                    httplib::to_string(res.error())));
    }
    if (res->status != 200) {
      throw OracleError(fmt::format("{}{} answered HTTP {}", base_, path_, res->status),
                        res->status);
    }
    return ChatResponseFromJson(res->body);
  }

 private:
  std::string base_;
  std::string path_;
  HttpEndpoint endpoint_;
};

}  // namespace

std::unique_ptr<ChatTransport> MakeHttpTransport(const HttpEndpoint& endpoint) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(endpoint.url, m, kUrl)) {
    throw ConfigError("oracle.endpoint is not an http(s) URL: '" + endpoint.url + "'");
  }
  std::string path = m[2].matched ? m[2].str() : "/";
  return std::make_unique<HttpTransport>(m[1].str(), std::move(path), endpoint);
}

LlmOracle::LlmOracle(EnvSpec env, std::shared_ptr<ChatTransport> transport,
                     LlmOracleConfig config)
    : env_(std::move(env)), transport_(std::move(transport)), config_(std::move(config)) {
  if (!transport_) throw ConfigError("LLM oracle needs a transport");
}

std::string LlmOracle::RankingPrompt(std::span<const Trajectory> batch, const RewardSpec& spec,
                                     const ParamVector& params) const {
  const auto descriptions = DescribeExecution(batch);
  return RenderTemplate(PromptTemplate("ranking"),
                        {{"reward_function", RenderRewardFunction(spec, params)},
                         {"descriptions", JoinDescriptions(descriptions)}});
}

std::string LlmOracle::ReflectionPrompt(std::span<const Trajectory> batch,
                                        const RewardSpec& spec,
                                        const ParamVector& params) const {
  const auto descriptions = DescribeExecution(batch);
  return RenderTemplate(PromptTemplate("reflection"),
                        {{"task_description", env_.task_description},
                         {"reward_function", RenderRewardFunction(spec, params)},
                         {"descriptions", JoinDescriptions(descriptions)}});
}

ChatResponse LlmOracle::Send(const std::string& user_prompt) {
  ChatRequest request;
  request.model = config_.model;
  request.temperature = config_.temperature;
  request.messages = {
      {"system", RenderTemplate(PromptTemplate("background"),
                                {{"observations", RenderObservationList(env_)}})},
      {"user", user_prompt}};
  ChatResponse response = transport_->Complete(request);
  tokens_.fetch_add(response.prompt_tokens + response.completion_tokens);
  return response;
}

OracleRanking LlmOracle::Rank(std::span<const Trajectory> batch, const RewardSpec& spec,
                              const ParamVector& params, std::uint64_t) {
  if (batch.empty()) throw std::invalid_argument("ranking needs a nonempty batch");
  const std::string prompt = RankingPrompt(batch, spec, params);
  std::string transcript;
  for (int attempt = 0;; ++attempt) {
    const ChatResponse reply = Send(prompt);
    transcript += fmt::format("=== prompt (attempt {}) ===\n{}\n=== reply ===\n{}\n", attempt + 1,
                              prompt, reply.content);
    try {
      const std::vector<int> order = ParseRankingReply(reply.content, batch.size());
      OracleRanking out;
      out.ranking.provenance = RankingProvenance::kOracle;
      for (int k : order) out.ranking.ids.push_back(batch[static_cast<std::size_t>(k)].id);
      transcript += "The final result is:\n[";
      for (std::size_t i = 0; i < order.size(); ++i) {
        transcript += (i ? ", " : "") + std::to_string(order[i]);
      }
      transcript += "]\n";
      out.transcript = std::move(transcript);
      return out;
    } catch (const ReplyParseError&) {
      if (attempt >= 1) throw;
    }
  }
}

OracleReflection LlmOracle::Reflect(std::span<const Trajectory> batch, const RewardSpec& spec,
                                    const ParamVector& params, std::uint64_t) {
  if (batch.empty()) throw std::invalid_argument("reflection needs a nonempty batch");
  const std::string prompt = ReflectionPrompt(batch, spec, params);
  std::string transcript;
  for (int attempt = 0;; ++attempt) {
    const ChatResponse reply = Send(prompt);
    transcript += fmt::format("=== prompt (attempt {}) ===\n{}\n=== reply ===\n{}\n", attempt + 1,
                              prompt, reply.content);
    try {
      OracleReflection out;
      out.directions = ParseReflectionReply(reply.content, params.names());
      out.transcript = std::move(transcript);
      return out;
    } catch (const ReplyParseError&) {
      if (attempt >= 1) throw;
    }
  }
}

}  // namespace selfalign
