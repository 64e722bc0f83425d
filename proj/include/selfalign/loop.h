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

#ifndef SELFALIGN_LOOP_H_
#define SELFALIGN_LOOP_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "selfalign/envs.h"
#include "selfalign/inference.h"
#include "selfalign/oracle.h"
#include "selfalign/ranking.h"
#include "selfalign/reward.h"
#include "selfalign/rl.h"

namespace selfalign {

struct AlignmentConfig {
  int max_iterations = 40;
  // Active adjustment runs when rankings agree but success is below this.
  double adjustment_threshold = 0.5;
  // The experiment stops once an iteration's success rate reaches this.
  double target_success = 0.9;
  int rollout_samples = 5;
  int histogram_samples = 5;
  int histogram_bins = 5;
  double beta = 0.9;
  std::vector<double> radii{1.0, 3.0, 5.0, 10.0};
  MHConfig mh;
  CEMConfig cem;
  int eval_episodes = 100;
  std::size_t buffer_capacity = 2000;
  // false keeps the reward parameters fixed; the oracle is still queried so
  // both conditions report the same metrics.
  bool update_rewards = true;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
  bool operator==(const AlignmentConfig& other) const = default;
};

struct IterationReport {
  int iteration = 0;  // 1-based
  std::size_t inconsistency_before = 0;
  std::size_t inconsistency_after = 0;
  double success_rate = 0.0;
  ParamVector params_before;
  ParamVector params_after;
  bool accepted = false;
  bool adjustment_fired = false;
  ReflectionResult directions;
  bool oracle_failed = false;
  std::string oracle_error;
  std::string transcript;
  std::vector<Trajectory> batch;
  Ranking reward_ranking;
  Ranking oracle_ranking;
  double update_radius = 0.0;
};

// State of one self-alignment experiment: reward parameters, policy, replay
// buffer and oracle. Iterations run sequentially.
class AlignmentRun {
 public:
  // Throws ConfigError when the spec does not fit the environment's feature
  // schema or the parameters do not fit the spec.
  AlignmentRun(const Env& env, RewardSpec spec, ParamVector params,
               std::shared_ptr<Oracle> oracle, AlignmentConfig config);

  // Train, evaluate, query the oracle and update the reward parameters.
  // Oracle errors are reported in the result and leave params unchanged.
  IterationReport RunIteration();

  // Greedy success rate of the current policy on the fixed evaluation block.
  double EvaluateSuccess() const;

  const ParamVector& params() const { return params_; }
  const LinearPolicy& policy() const { return policy_; }
  const RewardSpec& spec() const { return spec_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  int iteration() const { return iteration_; }
  std::uint64_t tokens_used() const { return oracle_->tokens_used(); }

 private:
  void ActiveAdjustment(IterationReport& report, std::uint64_t seed);

  const Env& env_;
  RewardSpec spec_;
  ParamVector params_;
  std::shared_ptr<Oracle> oracle_;
  AlignmentConfig config_;
  LinearPolicy policy_;
  ReplayBuffer buffer_;
  TrajectoryIdSource ids_;
  int iteration_ = 0;
};

struct ExperimentResult {
  std::vector<IterationReport> reports;
  double initial_success = 0.0;
  double final_success = 0.0;
  int iterations = 0;
  bool reached_target = false;
  std::uint64_t tokens = 0;
  double wall_seconds = 0.0;
  ParamVector final_params;
};

// Iterates until the target success rate or max_iterations. The callback
// sees every report as soon as it is produced.
ExperimentResult RunExperiment(AlignmentRun& run, const AlignmentConfig& config,
                               const std::function<void(const IterationReport&)>& on_iteration = {});

}  // namespace selfalign

#endif  // SELFALIGN_LOOP_H_
