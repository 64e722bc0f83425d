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

#include "selfalign/specgen.h"

#include <fmt/format.h>

#include <string>
#include <vector>

#include "selfalign/errors.h"
#include "selfalign/prompts.h"
#include "selfalign/reward_io.h"

namespace selfalign {

std::string RenderProposalPrompt(const EnvSpec& env, std::string_view task_description) {
  if (env.features.empty()) {
    throw ConfigError("environment '" + env.name + "' exposes no features to observe");
  }
  const std::vector<std::string> names = env.FeatureNames();
  std::string quoted;
  for (const auto& n : names) {
    if (!quoted.empty()) quoted += ", ";
    quoted += n;
  }
  const std::string background =
      RenderTemplate(PromptTemplate("background"),
                     {{"observations", RenderObservationList(env)}});
  const std::string task = RenderTemplate(
      PromptTemplate("reward_task"), {{"task_description", std::string(task_description)}});
  const std::string schema =
      RenderTemplate(PromptTemplate("proposal_schema"), {{"feature_names", quoted}});
  return background + "\n\n" + task + "\n\n" + schema;
}

std::string ExtractProposalBlock(std::string_view reply) {
  std::string_view block;
  std::size_t pos = 0;
  while ((pos = reply.find("```", pos)) != std::string_view::npos) {
    const std::size_t line_end = reply.find('\n', pos);
    if (line_end == std::string_view::npos) break;
    std::string_view tag = reply.substr(pos + 3, line_end - pos - 3);
    while (!tag.empty() && (tag.back() == '\r' || tag.back() == ' ')) tag.remove_suffix(1);
    const std::size_t close = reply.find("```", line_end + 1);
    if (close == std::string_view::npos) break;
    if (tag.empty() || tag == "json" || tag == "JSON") {
      block = reply.substr(line_end + 1, close - line_end - 1);
    }
    pos = close + 3;
  }
  if (!block.empty()) return std::string(block);
  const auto first = reply.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && reply[first] == '{') {
    return std::string(reply.substr(first));
  }
  return {};
}

RewardSpec ParseProposal(std::string_view reply,
                         std::optional<std::span<const std::string>> schema) {
  if (reply.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ValidationError({"empty reply: no proposal block found"});
  }
  const std::string block = ExtractProposalBlock(reply);
  if (block.empty()) {
    throw ValidationError({"reply contains no ```json proposal block"});
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(block);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError({fmt::format("proposal block is not valid JSON: {}", e.what())});
  }
  RewardSpec spec = RewardSpecFromJson(doc);
  if (schema) spec.CheckFeatureSchema(*schema);
  return spec;
}

std::string SerializeProposal(const RewardSpec& spec) {
  return "```json\n" + RewardSpecToJson(spec).dump(2) + "\n```\n";
}

}  // namespace selfalign
