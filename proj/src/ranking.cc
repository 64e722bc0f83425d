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

#include "selfalign/ranking.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "selfalign/errors.h"

namespace selfalign {

void Ranking::Validate() const {
  std::unordered_set<std::int64_t> seen;
  for (auto id : ids) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument(fmt::format("ranking repeats id {}", id));
    }
  }
}

Ranking RankByReturns(std::span<const std::int64_t> ids,
                      std::span<const double> returns) {
  if (ids.size() != returns.size()) throw std::invalid_argument("ids/returns size mismatch");
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (returns[a] != returns[b]) return returns[a] > returns[b];
    return ids[a] < ids[b];
  });
  Ranking r;
  r.provenance = RankingProvenance::kReward;
  for (auto i : order) r.ids.push_back(ids[i]);
  return r;
}

Ranking RankByReward(std::span<const Trajectory> batch, const RewardSpec& spec,
                     const ParamVector& params) {
  if (batch.empty()) throw std::invalid_argument("cannot rank an empty batch");
  std::vector<std::int64_t> ids;
  std::vector<double> returns;
  for (const auto& t : batch) {
    try {
      returns.push_back(EvaluateReturn(spec, params, t));
    } catch (const RewardError& e) {
      throw RewardError(fmt::format("trajectory {}: {}", t.id, e.what()));
    }
    ids.push_back(t.id);
  }
  return RankByReturns(ids, returns);
}

namespace {

std::unordered_map<std::int64_t, std::size_t> Positions(const Ranking& r) {
  std::unordered_map<std::int64_t, std::size_t> pos;
  for (std::size_t i = 0; i < r.ids.size(); ++i) pos[r.ids[i]] = i;
  return pos;
}

void CheckSameIds(const Ranking& a, const Ranking& b,
                  const std::unordered_map<std::int64_t, std::size_t>& pos_b) {
  if (a.ids.size() != b.ids.size() || pos_b.size() != b.ids.size()) {
    throw std::invalid_argument("rankings cover different id sets");
  }
  for (auto id : a.ids) {
    if (!pos_b.count(id)) {
      throw std::invalid_argument(fmt::format("id {} missing from one ranking", id));
    }
  }
}

IdPair Unordered(std::int64_t x, std::int64_t y) {
  return x < y ? IdPair{x, y} : IdPair{y, x};
}

}  // namespace

std::vector<IdPair> DiscrepancyPairs(const Ranking& a, const Ranking& b) {
  const auto pos_b = Positions(b);
  CheckSameIds(a, b, pos_b);
  std::vector<IdPair> out;
  const auto& ids = a.ids;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      // a places ids[i] above ids[j]
      if (pos_b.at(ids[i]) > pos_b.at(ids[j])) out.push_back(Unordered(ids[i], ids[j]));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t CountDiscrepancy(const Ranking& a, const Ranking& b) {
  return DiscrepancyPairs(a, b).size();
}

PreferenceDataset BuildPreferenceDataset(const Ranking& rank_reward,
                                         const Ranking& rank_oracle,
                                         std::span<const Trajectory> batch,
                                         double beta, std::uint64_t rng_seed) {
  PreferenceDataset data;
  data.beta = beta;
  data.trajectories.assign(batch.begin(), batch.end());

  const auto pos_reward = Positions(rank_reward);
  CheckSameIds(rank_oracle, rank_reward, pos_reward);

  std::vector<PreferencePair> discordant;
  std::vector<PreferencePair> concordant;
  const auto& ids = rank_oracle.ids;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const PreferencePair p{ids[i], ids[j],
                             pos_reward.at(ids[i]) > pos_reward.at(ids[j])
                                 ? PairSource::kDiscrepant
                                 : PairSource::kAgreed};
      (p.source == PairSource::kDiscrepant ? discordant : concordant).push_back(p);
    }
  }
  if (discordant.empty()) return data;

  std::mt19937_64 rng(rng_seed);
  std::shuffle(concordant.begin(), concordant.end(), rng);
  concordant.resize(std::min(concordant.size(), discordant.size()));

  data.pairs = std::move(discordant);
  data.pairs.insert(data.pairs.end(), concordant.begin(), concordant.end());
  std::shuffle(data.pairs.begin(), data.pairs.end(), rng);
  data.Validate();
  return data;
}

PreferenceDataset FullRankingDataset(const Ranking& rank_oracle,
                                     std::span<const Trajectory> batch,
                                     double beta) {
  PreferenceDataset data;
  data.beta = beta;
  data.trajectories.assign(batch.begin(), batch.end());
  const auto& ids = rank_oracle.ids;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      data.pairs.push_back({ids[i], ids[j], PairSource::kAgreed});
    }
  }
  data.Validate();
  return data;
}

}  // namespace selfalign
