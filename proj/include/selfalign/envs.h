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

#ifndef SELFALIGN_ENVS_H_
#define SELFALIGN_ENVS_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "selfalign/reward.h"

namespace selfalign {

enum class FeatureKind { kReal, kBool };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kReal;
  bool may_be_absent = false;
};

// A single threshold or boolean test on one feature.
struct StageCondition {
  enum class Op { kIsTrue, kIsFalse, kLess, kGreaterEqual };
  std::string feature;
  Op op = Op::kIsTrue;
  double threshold = 0.0;

  bool Holds(const FeatureRecord& features) const;
  std::string Describe() const;
};

enum class ScoreDirection { kHigherBetter, kLowerBetter };

// One task stage for the scripted oracle. Membership is a disjunction of
// conjunctions of conditions. Within a stage, samples are ordered by
// `score_feature`; `score_scale` converts feature units into the units the
// oracle's noise model sees.
struct StageRule {
  int stage = 0;
  std::string name;
  std::vector<std::vector<StageCondition>> any_of;
  std::string score_feature;
  ScoreDirection direction = ScoreDirection::kLowerBetter;
  double score_scale = 1.0;

  bool Matches(const FeatureRecord& features) const;
  // Larger is better, already scaled.
  double Score(const FeatureRecord& features) const;
  std::string Describe() const;
};

enum class Direction { kIncrease, kDecrease, kNoChange };

// Scripted reflection advice keyed on the furthest stage a batch reached.
struct StageAdvice {
  int stage = 0;
  std::vector<std::pair<std::string, Direction>> directions;
};

struct EnvSpec {
  std::string name;
  std::string task_description;
  int state_dim = 0;
  int observation_dim = 0;
  int action_dim = 0;
  double action_low = -1.0;
  double action_high = 1.0;
  int horizon = 1;
  bool terminate_on_success = false;
  std::vector<FeatureSpec> features;
  std::string success_description;
  std::vector<StageRule> stage_rules;
  std::vector<StageAdvice> reflection_advice;

  std::vector<std::string> FeatureNames() const;
};

using State = std::vector<double>;

struct StepResult {
  State state;
  FeatureRecord features;
  bool done = false;
};

// Deterministic environment. Instances hold no mutable state, so a single
// instance can serve concurrent rollouts.
class Env {
 public:
  virtual ~Env() = default;

  virtual const EnvSpec& spec() const = 0;
  // Initial state drawn from the documented spawn distribution.
  virtual State Reset(std::uint64_t seed) const = 0;
  // Actions are clipped to the action bounds. `step` is the index of the
  // step being taken (0-based); the returned features describe the new state
  // and carry that index.
  virtual StepResult Step(const State& state, std::span<const double> action,
                          int step) const = 0;
  // Policy input vector of size spec().observation_dim.
  virtual std::vector<double> Observe(const State& state) const = 0;
  virtual bool SuccessState(const State& state) const = 0;
  // Features of a state without stepping (used for the reset state).
  virtual FeatureRecord Features(const State& state, int step) const = 0;

  // Success predicate evaluated on the final state of a trajectory.
  bool Success(const Trajectory& traj) const;
  std::vector<double> ClipAction(std::span<const double> action) const;
};

// "point-reach", "pick-carry", "drawer-pull-1d". Throws ConfigError.
std::unique_ptr<Env> MakeEnv(const std::string& name);
std::vector<std::string> EnvNames();

// Point-reach with a configurable target spawn. spread = 0 places the target
// at the fixed start (0.75, 0).
std::unique_ptr<Env> MakePointReach(double spawn_spread = 1.0);

// Documented constants, exposed for tests.
namespace point_reach {
inline constexpr double kStepScale = 0.1;
inline constexpr double kSpawnMin = 0.5;
inline constexpr double kSpawnMax = 1.0;
inline constexpr double kSuccessDistance = 0.05;
inline constexpr int kHorizon = 30;
}  // namespace point_reach

namespace pick_carry {
inline constexpr double kStepScale = 0.1;
inline constexpr double kGraspRadius = 0.05;
inline constexpr double kSuccessDistance = 0.05;
inline constexpr double kWorkspace = 1.5;
inline constexpr int kHorizon = 40;
// State layout.
enum Index { kPx, kPy, kOx, kOy, kGx, kGy, kGrasped, kActionMag, kCollision, kDim };
}  // namespace pick_carry

namespace drawer_pull {
inline constexpr double kStepScale = 0.1;
inline constexpr double kClosedHandle = 1.0;
inline constexpr double kMaxOpening = 0.5;
inline constexpr double kContactRadius = 0.03;
inline constexpr double kSuccessOpening = 0.45;
inline constexpr double kMovedThreshold = 0.005;
inline constexpr int kHorizon = 40;
enum Index { kX, kQ, kContacted, kCollision, kActionMag, kDim };
}  // namespace drawer_pull

}  // namespace selfalign

#endif  // SELFALIGN_ENVS_H_
