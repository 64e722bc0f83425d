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

#include "support/recovery.h"

#include <random>
#include <vector>

#include "selfalign/inference.h"
#include "support/fixtures.h"
#include "support/reference.h"

namespace selfalign::testing {
namespace {

constexpr double kTrueTheta = 0.7;
constexpr double kBeta = 0.9;
constexpr int kPairs = 200;
constexpr int kHeldOut = 50;

struct Sample {
  double x, y;
};

RewardSpec RecoverySpec() {
  RewardTerm tx;
  tx.name = "x_reward";
  tx.weight_param = "theta";
  tx.form = ExpressionForm::kFeature;
  tx.feature = "x";
  RewardTerm ty = tx;
  ty.name = "y_reward";
  ty.weight_param = "w";
  ty.feature = "y";
  ParamVector p;
  p.Add("theta", 0.5, ParamDomain::Full(0.0, 1.0));
  ParamDomain frozen = ParamDomain::Full(0.0, 2.0);
  frozen.active_min = frozen.active_max = 1.0;
  p.Add("w", 1.0, frozen);
  return RewardSpec("recovery", {tx, ty}, p);
}

}  // namespace

RecoveryOutcome RunRecovery(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const RewardSpec spec = RecoverySpec();

  PreferenceDataset data;
  data.beta = kBeta;
  std::vector<std::pair<double, double>> diffs;
  for (int i = 0; i < kPairs; ++i) {
    Sample a{u(rng), u(rng)}, b{u(rng), u(rng)};
    if (kTrueTheta * a.x + a.y < kTrueTheta * b.x + b.y) std::swap(a, b);
    const std::int64_t id = 2 * i;
    data.trajectories.push_back(MakeTrajectory(
        id, {Record({{"x", FeatureValue::Real(a.x)}, {"y", FeatureValue::Real(a.y)}})}));
    data.trajectories.push_back(MakeTrajectory(
        id + 1, {Record({{"x", FeatureValue::Real(b.x)}, {"y", FeatureValue::Real(b.y)}})}));
    data.pairs.push_back({id, id + 1, PairSource::kDiscrepant});
    diffs.emplace_back(a.x - b.x, a.y - b.y);
  }

  MHConfig mh;
  mh.seed = seed;
  const PosteriorResult post = RunMetropolisHastings(data, spec, spec.defaults(), mh);

  RecoveryOutcome out;
  out.map_theta = post.map_estimate.value("theta");
  out.grid_theta = GridSearchMap1D(diffs, kBeta, 0.0, 1.0, 0.01);

  std::vector<double> by_map, by_grid, by_truth;
  for (int i = 0; i < kHeldOut; ++i) {
    const double x = u(rng), y = u(rng);
    by_map.push_back(out.map_theta * x + y);
    by_grid.push_back(out.grid_theta * x + y);
    by_truth.push_back(kTrueTheta * x + y);
  }
  out.agreement_with_grid = PairAgreement(by_map, by_grid);
  out.agreement_with_truth = PairAgreement(by_map, by_truth);
  return out;
}

}  // namespace selfalign::testing
