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

#ifndef SELFALIGN_INFERENCE_H_
#define SELFALIGN_INFERENCE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "selfalign/preference.h"
#include "selfalign/ranking.h"
#include "selfalign/reward.h"

namespace selfalign {

struct MHConfig {
  int burn_in = 200;
  int n_samples = 100;
  // Isotropic Gaussian step in normalized [0,1] coordinates.
  double proposal_sigma = 0.2;
  std::uint64_t seed = 0;
  bool record_trace = false;

  // Throws ConfigError.
  void Validate() const;
  bool operator==(const MHConfig& other) const = default;
};

struct ChainStep {
  int step = 0;
  double log_posterior = 0.0;
  bool accepted = false;
};

struct PosteriorResult {
  std::vector<ParamVector> samples;  // post burn-in, one per step
  ParamVector map_estimate;          // best state visited, burn-in included
  double map_log_posterior = 0.0;
  double acceptance_rate = 0.0;
  std::vector<ChainStep> trace;      // filled when MHConfig::record_trace
};

// Restricts the chain to a Euclidean ball (raw parameter units).
struct BallConstraint {
  ParamVector center;
  double radius = 0.0;
};

// Random-walk Metropolis in normalized coordinates. Proposals perturb every
// parameter whose active domain is not a single point, are clipped to
// [0,1], and states outside the active box or the ball score -inf. Fully
// determined by config.seed.
//
// Throws std::invalid_argument for an invalid dataset and Error when the
// initial state has zero posterior mass.
PosteriorResult RunMetropolisHastings(const PreferenceDataset& dataset,
                                      const RewardSpec& spec,
                                      const ParamVector& init,
                                      const MHConfig& config,
                                      const std::optional<BallConstraint>& ball = std::nullopt);

// step,log_posterior,accepted
void WriteChainTrace(const std::filesystem::path& path,
                     std::span<const ChainStep> trace);

struct Candidate {
  ParamVector params;
  double radius = 0.0;
  std::size_t discrepancy = 0;
  double distance_to_current = 0.0;
  // False when the chain never improved on its starting point.
  bool moved = true;
};

struct CandidateUpdate {
  ParamVector params;
  double radius = 0.0;  // 0 when current is returned unchanged
  std::size_t discrepancy_before = 0;
  std::size_t discrepancy_after = 0;
  double distance_to_current = 0.0;
  bool changed = false;
  std::vector<Candidate> candidates;  // one per radius, in radius order
};

// Among candidates that moved: fewest remaining discrepancies first, then
// nearest to current, then earliest. nullopt when there is no such
// candidate or the best would increase the discrepancy.
std::optional<std::size_t> SelectCandidate(std::span<const Candidate> candidates,
                                           std::size_t discrepancy_before);

// One chain per radius, run concurrently, each confined to the active box
// intersected with a ball of that radius around `current`. Chain MAPs are
// scored by discrepancy against `reference` over the dataset's trajectories
// (or, without a reference, by the number of dataset pairs the induced
// ranking violates). When `current` lies in its active box and is already
// fully consistent, it is returned without sampling.
CandidateUpdate RadiusConstrainedUpdate(const ParamVector& current,
                                        const PreferenceDataset& dataset,
                                        const RewardSpec& spec,
                                        std::span<const double> radii,
                                        const MHConfig& config,
                                        const Ranking* reference = nullptr);

// Discrepancy of the ranking `params` induce on the dataset trajectories.
std::size_t DatasetDiscrepancy(const ParamVector& params,
                               const PreferenceDataset& dataset,
                               const RewardSpec& spec,
                               const Ranking* reference);

}  // namespace selfalign

#endif  // SELFALIGN_INFERENCE_H_
