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

#ifndef SELFALIGN_PROMPTS_H_
#define SELFALIGN_PROMPTS_H_

#include <map>
#include <string>
#include <string_view>

#include "selfalign/envs.h"
#include "selfalign/reward.h"

namespace selfalign {

// Shipped templates: "background", "reward_task", "ranking", "reflection",
// "proposal_schema". Throws std::out_of_range for other names.
std::string_view PromptTemplate(std::string_view name);

// Substitutes every {placeholder} (lowercase letters and underscores) from
// `values`. Throws ConfigError naming any placeholder left unresolved.
std::string RenderTemplate(std::string_view tmpl,
                           const std::map<std::string, std::string>& values);

// Python-style get_reward() text for a spec at the given parameter values.
std::string RenderRewardFunction(const RewardSpec& spec, const ParamVector& params);

// Numbered obs['name'] lines for the background prompt.
std::string RenderObservationList(const EnvSpec& env);

}  // namespace selfalign

#endif  // SELFALIGN_PROMPTS_H_
