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

#ifndef SELFALIGN_ORACLE_H_
#define SELFALIGN_ORACLE_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selfalign/envs.h"
#include "selfalign/ranking.h"
#include "selfalign/reward.h"

namespace selfalign {

struct ExecutionDescription {
  int sample_index = 0;
  std::int64_t trajectory_id = 0;
  // "data sample k: name = value, ...."
  std::string line;
};

// "0.0589", "True", "None".
std::string FormatFeatureValue(const FeatureValue& value);
std::string DescribeFeatures(int sample_index, const FeatureRecord& features);

// One line per trajectory from its final step, in batch order. Throws
// std::invalid_argument when a trajectory has no steps or an empty record.
std::vector<ExecutionDescription> DescribeExecution(std::span<const Trajectory> batch);

// Prompt block: each line indented as "  - data sample k: ...".
std::string JoinDescriptions(std::span<const ExecutionDescription> descriptions);

enum class SwapModel { kNone, kBoltzmannAdjacent };

struct ScriptedOracleConfig {
  double beta = 0.9;
  SwapModel swap = SwapModel::kBoltzmannAdjacent;
  std::uint64_t seed = 0;

  bool operator==(const ScriptedOracleConfig& other) const = default;
};

// Index of the single rule whose predicate holds. Throws Error listing the
// predicates when none or several match.
std::size_t AssignStage(const FeatureRecord& features, std::span<const StageRule> rules);

// Clusters by stage, orders each cluster by stage score (ties by batch
// order), puts later stages first, then makes one seeded pass over adjacent
// same-stage pairs swapping each with probability 1 - logistic(beta * gap).
Ranking ScriptedRank(std::span<const Trajectory> batch, std::span<const StageRule> rules,
                     const ScriptedOracleConfig& config);

std::string_view DirectionName(Direction d);
using ReflectionResult = std::map<std::string, Direction>;

// Lookup keyed on the furthest stage any trajectory in the batch reached.
// Only parameters of `spec` are returned. Throws std::invalid_argument on an
// empty batch.
ReflectionResult ScriptedReflect(std::span<const Trajectory> batch, const EnvSpec& env,
                                 const RewardSpec& spec);

// Last non-empty line must be exactly a bracketed list that permutes
// 0..n-1. Throws ReplyParseError carrying the reply.
std::vector<int> ParseRankingReply(std::string_view reply, std::size_t n);

// Reads the final {...} literal. Each entry's trailing '#' comment decides
// its direction by the first of "no change", "increase", "decrease" it
// mentions; entries without a keyword are no-change. Throws ReplyParseError
// when no literal is present or a key is not in `parameter_names`.
ReflectionResult ParseReflectionReply(std::string_view reply,
                                      std::span<const std::string> parameter_names);

struct OracleRanking {
  Ranking ranking;
  std::string transcript;
};

struct OracleReflection {
  ReflectionResult directions;
  std::string transcript;
};

// Ranking and reflection feedback over a batch. Implementations must be safe
// to call from one thread at a time.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual OracleRanking Rank(std::span<const Trajectory> batch, const RewardSpec& spec,
                             const ParamVector& params, std::uint64_t seed) = 0;
  virtual OracleReflection Reflect(std::span<const Trajectory> batch,
                                   const RewardSpec& spec, const ParamVector& params,
                                   std::uint64_t seed) = 0;
  // Prompt plus completion tokens consumed so far.
  virtual std::uint64_t tokens_used() const { return 0; }
};

class ScriptedOracle : public Oracle {
 public:
  ScriptedOracle(EnvSpec env, ScriptedOracleConfig config);
  OracleRanking Rank(std::span<const Trajectory> batch, const RewardSpec& spec,
                     const ParamVector& params, std::uint64_t seed) override;
  OracleReflection Reflect(std::span<const Trajectory> batch, const RewardSpec& spec,
                           const ParamVector& params, std::uint64_t seed) override;

 private:
  EnvSpec env_;
  ScriptedOracleConfig config_;
};

}  // namespace selfalign

#endif  // SELFALIGN_ORACLE_H_
