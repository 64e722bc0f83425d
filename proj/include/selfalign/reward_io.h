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

#ifndef SELFALIGN_REWARD_IO_H_
#define SELFALIGN_REWARD_IO_H_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "selfalign/reward.h"

namespace selfalign {

// Reward specs serialize to a JSON document with a "parameters" array
// (name, default, min, max) and a "terms" array (name, weight_param, form,
// feature, plus negate / constant / threshold / threshold_feature where the
// form uses them).
nlohmann::json RewardSpecToJson(const RewardSpec& spec);
// Throws ValidationError listing every structural problem.
RewardSpec RewardSpecFromJson(const nlohmann::json& doc);

RewardSpec LoadRewardSpec(const std::filesystem::path& path);
void SaveRewardSpec(const RewardSpec& spec, const std::filesystem::path& path);

// Built-in specs: "open-drawer", "push-chair", "pick-carry", "point-reach".
std::vector<std::string> BuiltinSpecNames();
// Throws ConfigError for unknown names.
RewardSpec BuiltinSpec(const std::string& name);
// A built-in name, else a path to a JSON spec file.
RewardSpec ResolveRewardSpec(const std::string& name_or_path);

}  // namespace selfalign

#endif  // SELFALIGN_REWARD_IO_H_
