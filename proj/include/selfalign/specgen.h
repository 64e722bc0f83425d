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

#ifndef SELFALIGN_SPECGEN_H_
#define SELFALIGN_SPECGEN_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "selfalign/envs.h"
#include "selfalign/reward.h"

namespace selfalign {

// Background, task and structured-output instructions for a reward proposal,
// joined by blank lines. Throws ConfigError when the environment exposes no
// features or a placeholder cannot be filled.
std::string RenderProposalPrompt(const EnvSpec& env, std::string_view task_description);

// Extracts the structured block from a reply. The last ```json fenced block
// wins; a reply that is itself a JSON object is accepted as is. Any other
// text, including free-form code, is ignored.
std::string ExtractProposalBlock(std::string_view reply);

// Parses and validates a proposal. With a schema, every referenced feature
// must appear in it. Throws ValidationError with one item per problem.
RewardSpec ParseProposal(std::string_view reply,
                         std::optional<std::span<const std::string>> schema = std::nullopt);

// Renders a spec as a fenced block that ParseProposal reads back.
std::string SerializeProposal(const RewardSpec& spec);

}  // namespace selfalign

#endif  // SELFALIGN_SPECGEN_H_
