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

#include "selfalign/preference.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include <fmt/format.h>

namespace selfalign {

std::string_view PairSourceName(PairSource source) {
  return source == PairSource::kDiscrepant ? "discrepant" : "agreed";
}

void PreferenceDataset::Validate() const {
  if (!(beta >= 0.0)) throw std::invalid_argument("rationality beta must be >= 0");
  std::unordered_set<std::int64_t> ids;
  for (const auto& t : trajectories) {
    if (!ids.insert(t.id).second) {
      throw std::invalid_argument(fmt::format("duplicate trajectory id {}", t.id));
    }
  }
  for (const auto& p : pairs) {
    if (p.preferred == p.dispreferred) {
      throw std::invalid_argument(fmt::format("reflexive pair on id {}", p.preferred));
    }
    for (std::int64_t id : {p.preferred, p.dispreferred}) {
      if (!ids.count(id)) {
        throw std::invalid_argument(fmt::format("pair references unknown trajectory id {}", id));
      }
    }
  }
}

std::size_t PreferenceDataset::IndexOf(std::int64_t id) const {
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    if (trajectories[i].id == id) return i;
  }
  throw std::out_of_range(fmt::format("unknown trajectory id {}", id));
}

namespace {

void CheckInputs(double ri, double rj, double beta) {
  if (!std::isfinite(ri) || !std::isfinite(rj)) {
    throw std::invalid_argument("non-finite trajectory return");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("rationality beta must be finite and >= 0");
  }
}

}  // namespace

double PairwiseLikelihood(double return_i, double return_j, double beta) {
  CheckInputs(return_i, return_j, beta);
  const double x = beta * (return_i - return_j);
  const double upper = 1.0 / (1.0 + std::exp(-std::abs(x)));
  // upper lies in [0.5, 1], so 1 - upper is exact and the two orders of a
  // pair sum to exactly one.
  return x >= 0.0 ? upper : 1.0 - upper;
}

double LogPairwiseLikelihood(double return_i, double return_j, double beta) {
  CheckInputs(return_i, return_j, beta);
  const double x = beta * (return_i - return_j);
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

double LogPosterior(const ParamVector& params, const PreferenceDataset& dataset,
                    const RewardSpec& spec) {
  spec.CheckConforms(params);
  if (!params.InActiveDomain()) return -std::numeric_limits<double>::infinity();
  std::vector<double> returns(dataset.trajectories.size());
  for (std::size_t i = 0; i < returns.size(); ++i) {
    returns[i] = EvaluateReturn(spec, params, dataset.trajectories[i]);
  }
  double total = 0.0;
  for (const auto& p : dataset.pairs) {
    total += LogPairwiseLikelihood(returns[dataset.IndexOf(p.preferred)],
                                   returns[dataset.IndexOf(p.dispreferred)],
                                   dataset.beta);
  }
  return total;
}

}  // namespace selfalign
