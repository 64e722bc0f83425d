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

#include "selfalign/rl.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "parallel.h"
#include "selfalign/errors.h"
#include "selfalign/seeding.h"

namespace selfalign {

LinearPolicy LinearPolicy::Zeros(const EnvSpec& spec) {
  LinearPolicy p;
  p.observation_dim = spec.observation_dim;
  p.action_dim = spec.action_dim;
  p.params.assign(static_cast<std::size_t>(spec.action_dim) * (spec.observation_dim + 1), 0.0);
  return p;
}

std::vector<double> LinearPolicy::Mean(std::span<const double> observation) const {
  if (static_cast<int>(observation.size()) != observation_dim) {
    throw std::invalid_argument(fmt::format("policy expects {} observations, got {}",
                                            observation_dim, observation.size()));
  }
  std::vector<double> out(action_dim);
  const double* w = params.data();
  const double* b = w + static_cast<std::size_t>(action_dim) * observation_dim;
  for (int a = 0; a < action_dim; ++a) {
    double sum = b[a];
    for (int o = 0; o < observation_dim; ++o) sum += w[a * observation_dim + o] * observation[o];
    out[a] = sum;
  }
  return out;
}

void CEMConfig::Validate() const {
  if (population < 2) throw ConfigError("cem.population must be >= 2");
  if (!(elite_fraction > 0.0 && elite_fraction < 1.0)) {
    throw ConfigError("cem.elite_fraction must lie in (0, 1)");
  }
  if (generations < 0) throw ConfigError("cem.generations must be >= 0");
  if (episodes < 1) throw ConfigError("cem.episodes must be >= 1");
  if (!(init_std > 0.0) || !(min_std >= 0.0)) throw ConfigError("cem std settings must be positive");
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
}

void ReplayBuffer::Add(Entry entry) {
  std::lock_guard<std::mutex> lock(mu_);
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(std::move(entry));
}

std::vector<ReplayBuffer::Entry> ReplayBuffer::Snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return {entries_.begin(), entries_.end()};
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

Trajectory RunEpisode(const Env& env, const LinearPolicy& policy,
                      std::uint64_t reset_seed, const std::uint64_t* noise_seed,
                      std::int64_t id) {
  const EnvSpec& spec = env.spec();
  Trajectory traj;
  traj.id = id;
  std::mt19937_64 rng(noise_seed ? *noise_seed : 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  State state = env.Reset(reset_seed);
  for (int t = 0; t < spec.horizon; ++t) {
    std::vector<double> action = policy.Mean(env.Observe(state));
    if (noise_seed != nullptr) {
      for (double& a : action) a += policy.exploration_std * gauss(rng);
    }
    action = env.ClipAction(action);
    StepResult r = env.Step(state, action, t);
    state = r.state;
    traj.states.push_back(std::move(r.state));
    traj.actions.push_back(std::move(action));
    traj.features.push_back(std::move(r.features));
    if (r.done) break;
  }
  traj.success = env.Success(traj);
  return traj;
}

std::vector<Trajectory> Rollout(const Env& env, const LinearPolicy& policy, int m,
                                std::uint64_t seed, TrajectoryIdSource& ids) {
  if (m < 1) throw std::invalid_argument("rollout count must be >= 1");
  std::vector<Trajectory> out;
  out.reserve(m);
  for (int k = 0; k < m; ++k) {
    out.push_back(RunEpisode(env, policy, DeriveSeed(seed, {static_cast<std::uint64_t>(k)}),
                             nullptr, ids.Next()));
  }
  return out;
}

namespace {

struct Scored {
  double score = 0.0;
  std::vector<double> params;
};

}  // namespace

LinearPolicy TrainPolicy(const Env& env, const RewardSpec& spec,
                         const ParamVector& params, const LinearPolicy& init,
                         const CEMConfig& config, ReplayBuffer* buffer,
                         TrajectoryIdSource& ids, TrainStats* stats) {
  config.Validate();
  spec.CheckConforms(params);
  if (config.generations == 0) return init;

  const std::size_t dim = init.num_params();
  const std::size_t pop = static_cast<std::size_t>(config.population);
  const std::size_t n_elite = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(config.elite_fraction * config.population)));
  const std::size_t episodes = static_cast<std::size_t>(config.episodes);

  std::vector<std::uint64_t> reset_seeds(episodes);
  for (std::size_t e = 0; e < episodes; ++e) reset_seeds[e] = DeriveSeed(config.seed, {0, e});

  std::mt19937_64 rng(DeriveSeed(config.seed, {1}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> mean = init.params;
  std::vector<double> stddev(dim, config.init_std);
  std::vector<Scored> elites;

  for (int g = 0; g < config.generations; ++g) {
    std::vector<Scored> members(pop);
    for (std::size_t k = 0; k < pop; ++k) {
      members[k].params = mean;
      if (g == 0 && k == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) members[k].params[d] += stddev[d] * gauss(rng);
    }
    std::vector<std::int64_t> first_id(pop);
    for (std::size_t k = 0; k < pop; ++k) {
      first_id[k] = ids.Next();
      for (std::size_t e = 1; e < episodes; ++e) ids.Next();
    }

    std::vector<std::vector<Trajectory>> rollouts(pop);
    std::vector<std::vector<double>> returns(pop);
    internal::ParallelFor(pop, [&](std::size_t k) {
      LinearPolicy policy = init;
      policy.params = members[k].params;
      double total = 0.0;
      for (std::size_t e = 0; e < episodes; ++e) {
        const std::uint64_t noise_seed =
            DeriveSeed(config.seed, {2, static_cast<std::uint64_t>(g), k, e});
        Trajectory traj = RunEpisode(env, policy, reset_seeds[e],
                                     config.explore ? &noise_seed : nullptr,
                                     first_id[k] + static_cast<std::int64_t>(e));
        const double ret = EvaluateReturn(spec, params, traj);
        total += ret;
        returns[k].push_back(ret);
        rollouts[k].push_back(std::move(traj));
      }
      members[k].score = total / static_cast<double>(episodes);
    });

    if (buffer != nullptr) {
      for (std::size_t k = 0; k < pop; ++k) {
        for (std::size_t e = 0; e < episodes; ++e) {
          Trajectory& t = rollouts[k][e];
          buffer->Add({t.id, std::move(t.features), returns[k][e], t.success});
        }
      }
    }

    std::vector<Scored> pool = std::move(elites);
    pool.insert(pool.end(), std::make_move_iterator(members.begin()),
                std::make_move_iterator(members.end()));
    std::stable_sort(pool.begin(), pool.end(),
                     [](const Scored& a, const Scored& b) { return a.score > b.score; });
    pool.resize(std::min(n_elite, pool.size()));
    elites = std::move(pool);

    double score_sum = 0.0;
    std::fill(mean.begin(), mean.end(), 0.0);
    for (const auto& e : elites) {
      score_sum += e.score;
      for (std::size_t d = 0; d < dim; ++d) mean[d] += e.params[d];
    }
    for (double& m : mean) m /= static_cast<double>(elites.size());
    for (std::size_t d = 0; d < dim; ++d) {
      double var = 0.0;
      for (const auto& e : elites) var += (e.params[d] - mean[d]) * (e.params[d] - mean[d]);
      stddev[d] = std::max(config.min_std, std::sqrt(var / static_cast<double>(elites.size())));
    }
    if (stats != nullptr) {
      stats->elite_mean_return.push_back(score_sum / static_cast<double>(elites.size()));
    }
  }

  LinearPolicy out = init;
  out.params = mean;
  return out;
}

double EvaluateSuccessRate(const Env& env, const LinearPolicy& policy,
                           int episodes, std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("evaluation needs at least one episode");
  std::vector<char> ok(episodes, 0);
  internal::ParallelFor(static_cast<std::size_t>(episodes), [&](std::size_t k) {
    ok[k] = RunEpisode(env, policy, DeriveSeed(seed, {k}), nullptr, 0).success ? 1 : 0;
  });
  return static_cast<double>(std::accumulate(ok.begin(), ok.end(), 0)) / episodes;
}

std::vector<std::size_t> HistogramSampleIndices(std::span<const double> returns,
                                                int n, int bins,
                                                std::uint64_t seed) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  std::vector<std::size_t> out;
  if (returns.empty() || n <= 0) return out;
  std::mt19937_64 rng(seed);
  const auto [lo_it, hi_it] = std::minmax_element(returns.begin(), returns.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  if (!(hi > lo)) {
    std::vector<std::size_t> all(returns.size());
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min<std::size_t>(all.size(), n));
    return all;
  }

  const double width = (hi - lo) / bins;
  std::vector<std::vector<std::size_t>> bin(bins);
  for (std::size_t i = 0; i < returns.size(); ++i) {
    int b = static_cast<int>(std::floor((returns[i] - lo) / width));
    bin[std::clamp(b, 0, bins - 1)].push_back(i);
  }
  std::size_t remaining = returns.size();
  while (out.size() < static_cast<std::size_t>(n) && remaining > 0) {
    for (auto& members : bin) {
      if (members.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      const std::size_t j = pick(rng);
      out.push_back(members[j]);
      members.erase(members.begin() + static_cast<std::ptrdiff_t>(j));
      --remaining;
      if (out.size() == static_cast<std::size_t>(n)) break;
    }
  }
  return out;
}

std::vector<Trajectory> HistogramSample(const ReplayBuffer& buffer,
                                        const RewardSpec& spec,
                                        const ParamVector& params, int n,
                                        int bins, std::uint64_t seed) {
  const auto entries = buffer.Snapshot();
  std::vector<double> returns;
  returns.reserve(entries.size());
  for (const auto& e : entries) returns.push_back(EvaluateReturn(spec, params, e.features));
  std::vector<Trajectory> out;
  for (std::size_t i : HistogramSampleIndices(returns, n, bins, seed)) {
    Trajectory t;
    t.id = entries[i].id;
    t.features = entries[i].features;
    t.success = entries[i].success;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace selfalign
