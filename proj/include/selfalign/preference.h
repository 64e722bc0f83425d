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

#ifndef SELFALIGN_PREFERENCE_H_
#define SELFALIGN_PREFERENCE_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "selfalign/reward.h"

namespace selfalign {

enum class PairSource { kDiscrepant, kAgreed };

std::string_view PairSourceName(PairSource source);

// preferred is ranked above dispreferred by the oracle.
struct PreferencePair {
  std::int64_t preferred = 0;
  std::int64_t dispreferred = 0;
  PairSource source = PairSource::kDiscrepant;

  bool operator==(const PreferencePair& other) const = default;
};

struct PreferenceDataset {
  std::vector<PreferencePair> pairs;
  std::vector<Trajectory> trajectories;
  double beta = 0.9;

  bool empty() const { return pairs.empty(); }
  // Throws std::invalid_argument when a pair references an unknown id, a
  // pair is reflexive, trajectory ids repeat, or beta is negative.
  void Validate() const;
  // Position of `id` in `trajectories`; throws std::out_of_range.
  std::size_t IndexOf(std::int64_t id) const;
};

// P(i preferred over j) = exp(b*ri) / (exp(b*ri) + exp(b*rj)), evaluated as
// the logistic of b*(ri - rj). Throws std::invalid_argument on non-finite
// returns or negative beta.
double PairwiseLikelihood(double return_i, double return_j, double beta);
// log of the above without forming the ratio; finite for all finite inputs.
double LogPairwiseLikelihood(double return_i, double return_j, double beta);

// Sum of pair log-likelihoods plus a uniform log-prior over the active
// domain box with its normalizing constant dropped: 0 inside, -inf outside.
double LogPosterior(const ParamVector& params, const PreferenceDataset& dataset,
                    const RewardSpec& spec);

}  // namespace selfalign

#endif  // SELFALIGN_PREFERENCE_H_
