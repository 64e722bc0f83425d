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

#include <string>
#include <vector>

#include "selfalign/errors.h"
#include "selfalign/reward_io.h"

namespace selfalign {
namespace {

constexpr double kWeightMin = 0.0;
constexpr double kWeightMax = 10.0;

RewardTerm Negated(std::string name, std::string weight, std::string feature) {
  RewardTerm t;
  t.name = std::move(name);
  t.weight_param = std::move(weight);
  t.form = ExpressionForm::kNegatedFeature;
  t.feature = std::move(feature);
  return t;
}

RewardTerm Gated(std::string name, std::string weight, std::string gate,
                 bool negative, bool negate_gate = false) {
  RewardTerm t;
  t.name = std::move(name);
  t.weight_param = std::move(weight);
  t.form = negative ? ExpressionForm::kGatedNegatedConstant
                    : ExpressionForm::kGatedConstant;
  t.feature = std::move(gate);
  t.negate_gate = negate_gate;
  t.constant = 1.0;
  return t;
}

ParamVector Weights(std::initializer_list<std::pair<const char*, double>> defaults) {
  ParamVector p;
  for (const auto& [name, value] : defaults) {
    p.Add(name, value, ParamDomain::Full(kWeightMin, kWeightMax));
  }
  return p;
}

// Drawer opening: seven weighted terms with two fixed thresholds (2 cm and
// 15 cm) that are constants, not parameters.
RewardSpec OpenDrawer() {
  RewardTerm non_progress =
      Gated("non_progress_penalty", "non_progress_penalty_weight", "contacted",
            /*negative=*/true, /*negate_gate=*/true);
  non_progress.threshold_feature = "distance_to_handle";
  non_progress.threshold = 0.02;

  RewardTerm excessive;
  excessive.name = "excessive_distance_penalty";
  excessive.weight_param = "distance_penalty_weight";
  excessive.form = ExpressionForm::kThresholdedNegatedFeature;
  excessive.feature = "distance_to_handle";
  excessive.threshold = 0.15;

  return RewardSpec(
      "open-drawer",
      {Negated("alignment_reward", "alignment_weight", "distance_to_handle"),
       Negated("approach_reward", "approach_weight", "distance_to_handle"),
       Gated("grasp_reward", "grasp_weight", "contacted", false),
       Negated("pull_reward", "pull_weight", "distance_to_goal"),
       Gated("collision_penalty", "collision_penalty_weight", "collision", true),
       non_progress, excessive},
      Weights({{"alignment_weight", 1.0},
               {"approach_weight", 1.0},
               {"grasp_weight", 1.0},
               {"pull_weight", 1.0},
               {"collision_penalty_weight", 1.0},
               {"non_progress_penalty_weight", 1.0},
               {"distance_penalty_weight", 0.1}}));
}

RewardSpec PushChair() {
  return RewardSpec(
      "push-chair",
      {Negated("approach_reward", "approach_weight", "distance_to_target"),
       Negated("movement_reward", "movement_weight", "distance_to_goal"),
       Gated("collision_penalty", "collision_penalty_weight", "collision", true)},
      Weights({{"approach_weight", 1.0},
               {"movement_weight", 1.0},
               {"collision_penalty_weight", 1.0}}));
}

RewardSpec PickCarry() {
  return RewardSpec(
      "pick-carry",
      {Negated("approach_reward", "approach_weight", "distance_to_target"),
       Gated("grasp_reward", "grasp_weight", "grasped", false),
       Negated("transport_reward", "transport_weight", "distance_to_goal"),
       Negated("action_penalty", "action_penalty_weight", "action_magnitude"),
       Gated("collision_penalty", "collision_penalty_weight", "collision", true)},
      Weights({{"approach_weight", 1.0},
               {"grasp_weight", 0.5},
               {"transport_weight", 2.0},
               {"action_penalty_weight", 0.2},
               {"collision_penalty_weight", 1.0}}));
}

RewardSpec PointReach() {
  return RewardSpec("point-reach",
                    {Negated("approach_reward", "approach_weight", "distance_to_target")},
                    Weights({{"approach_weight", 1.0}}));
}

}  // namespace

std::vector<std::string> BuiltinSpecNames() {
  return {"open-drawer", "push-chair", "pick-carry", "point-reach"};
}

RewardSpec BuiltinSpec(const std::string& name) {
  if (name == "open-drawer") return OpenDrawer();
  if (name == "push-chair") return PushChair();
  if (name == "pick-carry") return PickCarry();
  if (name == "point-reach") return PointReach();
  throw ConfigError("unknown built-in reward spec: " + name);
}

}  // namespace selfalign
