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

#ifndef SELFALIGN_RANKING_H_
#define SELFALIGN_RANKING_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "selfalign/preference.h"
#include "selfalign/reward.h"

namespace selfalign {

enum class RankingProvenance { kReward, kOracle };

// Trajectory ids, most preferred first.
struct Ranking {
  std::vector<std::int64_t> ids;
  RankingProvenance provenance = RankingProvenance::kReward;

  // Throws std::invalid_argument on duplicate ids.
  void Validate() const;
  bool operator==(const Ranking& other) const = default;
};

// An unordered trajectory pair, stored with first < second.
using IdPair = std::pair<std::int64_t, std::int64_t>;

// Sort by descending return, ties by ascending id.
Ranking RankByReturns(std::span<const std::int64_t> ids,
                      std::span<const double> returns);
// Errors from reward evaluation are rethrown with the trajectory id.
Ranking RankByReward(std::span<const Trajectory> batch, const RewardSpec& spec,
                     const ParamVector& params);

// Kendall-discordant pairs between two rankings of the same id set, sorted.
// Throws std::invalid_argument when the id sets differ.
std::vector<IdPair> DiscrepancyPairs(const Ranking& a, const Ranking& b);
std::size_t CountDiscrepancy(const Ranking& a, const Ranking& b);

// Every discordant pair plus an equal number of concordant pairs sampled
// uniformly without replacement (all of them when fewer exist), each oriented
// by the oracle ranking, then shuffled. Empty when the rankings agree.
PreferenceDataset BuildPreferenceDataset(const Ranking& rank_reward,
                                         const Ranking& rank_oracle,
                                         std::span<const Trajectory> batch,
                                         double beta, std::uint64_t rng_seed);

// All C(n,2) pairs implied by the oracle ranking, tagged as agreed. Used
// when the parameter search must preserve an already consistent ranking.
PreferenceDataset FullRankingDataset(const Ranking& rank_oracle,
                                     std::span<const Trajectory> batch,
                                     double beta);

}  // namespace selfalign

#endif  // SELFALIGN_RANKING_H_
