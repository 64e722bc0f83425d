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

#ifndef SELFALIGN_RUN_CONFIG_H_
#define SELFALIGN_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfalign/loop.h"
#include "selfalign/oracle.h"

namespace selfalign {

enum class OracleBackend { kScripted, kLlm };

struct OracleSettings {
  OracleBackend backend = OracleBackend::kScripted;
  // Scripted backend.
  double beta = 0.9;
  SwapModel swap = SwapModel::kBoltzmannAdjacent;
  // LLM backend. The key itself is never stored; only the name of the
  // environment variable that holds it.
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4";
  double temperature = 0.0;
  std::string api_key_env = "SELFALIGN_API_KEY";
  int timeout_seconds = 120;

  bool operator==(const OracleSettings& other) const = default;
};

// Everything needed to reproduce a set of experiments. Serialized as JSON;
// every key is optional except "env".
struct RunConfig {
  std::string condition = "self-alignment";
  std::string env;
  // Built-in spec name or path to a spec file. Empty selects the built-in
  // spec named after the environment.
  std::string reward_spec;
  std::map<std::string, double> initial_params;
  OracleSettings oracle;
  AlignmentConfig alignment;
  std::filesystem::path out = "runs";
  std::vector<std::uint64_t> seeds{1};

  // Checks names, files and ranges. Throws ConfigError naming the field.
  void Validate() const;
  bool operator==(const RunConfig& other) const = default;
};

nlohmann::ordered_json RunConfigToJson(const RunConfig& config);
// Unknown keys and wrong types are errors that name the offending field.
RunConfig RunConfigFromJson(const nlohmann::json& doc);

// Relative reward-spec paths are resolved against the config file's
// directory. Throws ConfigError.
RunConfig LoadRunConfig(const std::filesystem::path& path);
void SaveRunConfig(const RunConfig& config, const std::filesystem::path& path);

// "1,2,3" or "1-5". Throws ConfigError.
std::vector<std::uint64_t> ParseSeedList(const std::string& text);

// The spec the config refers to, with initial-parameter overrides applied
// and checked against their domains.
RewardSpec ResolveSpec(const RunConfig& config);
ParamVector InitialParams(const RunConfig& config, const RewardSpec& spec);

}  // namespace selfalign

#endif  // SELFALIGN_RUN_CONFIG_H_
