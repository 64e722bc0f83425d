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

#ifndef SELFALIGN_RL_H_
#define SELFALIGN_RL_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <span>
#include <vector>

#include "selfalign/envs.h"
#include "selfalign/reward.h"

namespace selfalign {

// Linear state-feedback policy: mean action = W * obs + b, with a fixed
// diagonal Gaussian exploration noise.
struct LinearPolicy {
  int observation_dim = 0;
  int action_dim = 0;
  // Row-major W (action_dim x observation_dim) followed by b (action_dim).
  std::vector<double> params;
  double exploration_std = 0.05;

  static LinearPolicy Zeros(const EnvSpec& spec);
  std::size_t num_params() const { return params.size(); }
  std::vector<double> Mean(std::span<const double> observation) const;
  bool operator==(const LinearPolicy& other) const = default;
};

struct CEMConfig {
  int population = 32;
  double elite_fraction = 0.25;
  int generations = 8;
  // Episodes per population member, each from a distinct reset seed.
  int episodes = 4;
  double init_std = 0.5;
  double min_std = 0.05;
  // Exploration noise during training rollouts.
  bool explore = true;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
  bool operator==(const CEMConfig& other) const = default;
};

// Hands out strictly increasing trajectory ids.
class TrajectoryIdSource {
 public:
  explicit TrajectoryIdSource(std::int64_t first = 0) : next_(first) {}
  std::int64_t Next() { return next_.fetch_add(1); }
  std::int64_t peek() const { return next_.load(); }

 private:
  std::atomic<std::int64_t> next_;
};

// FIFO buffer of feature sequences. Rewards are never stored as ground
// truth; `collection_return` is kept only to audit relabeling.
class ReplayBuffer {
 public:
  struct Entry {
    std::int64_t id = 0;
    std::vector<FeatureRecord> features;
    double collection_return = 0.0;
    bool success = false;
  };

  explicit ReplayBuffer(std::size_t capacity);

  // Thread-safe.
  void Add(Entry entry);
  std::vector<Entry> Snapshot() const;
  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::deque<Entry> entries_;
};

// One episode. `noise_seed` drives exploration; pass nullptr for greedy
// actions. The episode stops at the horizon or, for environments that
// terminate on success, at the first successful state.
Trajectory RunEpisode(const Env& env, const LinearPolicy& policy,
                      std::uint64_t reset_seed, const std::uint64_t* noise_seed,
                      std::int64_t id);

// m greedy episodes from reset seeds derived from `seed`.
std::vector<Trajectory> Rollout(const Env& env, const LinearPolicy& policy, int m,
                                std::uint64_t seed, TrajectoryIdSource& ids);

struct TrainStats {
  // Mean score of the elite set after each generation.
  std::vector<double> elite_mean_return;
};

// Elitist cross-entropy method over the policy parameters, scored by mean
// return under (spec, params) on reset seeds fixed for the whole call. The
// initial policy competes in generation 0 and elites carry over with their
// scores, so the elite mean score never decreases. Returns the final
// sampling mean. Every training rollout is appended to `buffer` when given.
LinearPolicy TrainPolicy(const Env& env, const RewardSpec& spec,
                         const ParamVector& params, const LinearPolicy& init,
                         const CEMConfig& config, ReplayBuffer* buffer,
                         TrajectoryIdSource& ids, TrainStats* stats = nullptr);

// Fraction of greedy episodes that succeed, over reset seeds
// DeriveSeed(seed, {k}) for k < episodes.
double EvaluateSuccessRate(const Env& env, const LinearPolicy& policy,
                           int episodes, std::uint64_t seed);

// Relabels every buffered return under `params`, bins them into `bins`
// equal-width bins and cycles through the non-empty bins in ascending order,
// drawing one entry uniformly without replacement per visit. Falls back to
// uniform sampling when all returns are equal. Returned trajectories carry
// features and success only.
std::vector<Trajectory> HistogramSample(const ReplayBuffer& buffer,
                                        const RewardSpec& spec,
                                        const ParamVector& params, int n,
                                        int bins, std::uint64_t seed);

// Same rule over precomputed returns; yields indices into `returns`.
std::vector<std::size_t> HistogramSampleIndices(std::span<const double> returns,
                                                int n, int bins,
                                                std::uint64_t seed);

}  // namespace selfalign

#endif  // SELFALIGN_RL_H_
