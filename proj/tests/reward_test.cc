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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "selfalign/errors.h"
#include "selfalign/reward.h"
#include "selfalign/reward_io.h"
#include "support/fixtures.h"

namespace selfalign {
namespace {

using testing::MakeTrajectory;
using testing::Record;

FeatureRecord DrawerFeatures() {
  return Record({{"distance_to_handle", FeatureValue::Real(0.10)},
                 {"distance_to_goal", FeatureValue::Real(0.20)},
                 {"contacted", FeatureValue::Bool(false)},
                 {"collision", FeatureValue::Bool(false)}});
}

TEST(FeatureValueTest, KindsAndCoercions) {
  EXPECT_TRUE(FeatureValue::Absent().is_absent());
  EXPECT_EQ(FeatureValue::Bool(true).AsReal(), 1.0);
  EXPECT_FALSE(FeatureValue::Real(0.0).AsBool());
  EXPECT_THROW(FeatureValue::Absent().AsReal(), std::logic_error);
  EXPECT_NE(FeatureValue::Absent(), FeatureValue::Real(0.0));
}

TEST(EvaluateRewardTest, EmptySpecIsZero) {
  RewardSpec spec("empty", {}, ParamVector());
  EXPECT_EQ(EvaluateReward(spec, spec.defaults(), DrawerFeatures()), 0.0);
}

TEST(EvaluateRewardTest, SingleNegatedTerm) {
  RewardTerm t;
  t.name = "approach_reward";
  t.weight_param = "approach_weight";
  t.feature = "distance_to_target";
  ParamVector p;
  p.Add("approach_weight", 1.0, ParamDomain::Full(0, 10));
  RewardSpec spec("reach", {t}, p);
  EXPECT_DOUBLE_EQ(
      EvaluateReward(spec, p, Record({{"distance_to_target", FeatureValue::Real(0.5)}})), -0.5);
}

TEST(EvaluateRewardTest, DrawerSpecHandEvaluation) {
  const RewardSpec spec = BuiltinSpec("open-drawer");
  // -0.10 - 0.10 + 0 - 0.20 + 0 - 1.0 + 0 with the thresholds 0.02 and 0.15.
  EXPECT_NEAR(EvaluateReward(spec, spec.defaults(), DrawerFeatures()), -1.40, 1e-12);

  ParamVector doubled_pull = spec.defaults();
  doubled_pull.Set("pull_weight", 2.0);
  EXPECT_NEAR(Relabel(DrawerFeatures(), spec, doubled_pull), -1.60, 1e-12);
}

TEST(EvaluateRewardTest, GateShortCircuitsAbsentThresholdFeature) {
  const RewardSpec spec = BuiltinSpec("open-drawer");
  FeatureRecord f = DrawerFeatures();
  f.Set("contacted", FeatureValue::Bool(true));
  f.Set("distance_to_handle", FeatureValue::Real(0.2));
  // Contacted: the non-progress gate is closed. The excessive-distance term
  // fires because 0.2 > 0.15.
  const double expected = -0.2 - 0.2 + 1.0 - 0.2 - 0.1 * 0.2;
  EXPECT_NEAR(EvaluateReward(spec, spec.defaults(), f), expected, 1e-12);
}

TEST(EvaluateRewardTest, MissingFeatureNamesTermAndFeature) {
  const RewardSpec spec = BuiltinSpec("pick-carry");
  try {
    EvaluateReward(spec, spec.defaults(), Record({{"grasped", FeatureValue::Bool(true)}}));
    FAIL() << "expected RewardError";
  } catch (const RewardError& e) {
    EXPECT_NE(std::string(e.what()).find("distance_to_target"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("approach_reward"), std::string::npos);
  }
}

TEST(EvaluateReturnTest, SumsSteps) {
  const RewardSpec spec = testing::LinearSpec({"x"});
  Trajectory t = MakeTrajectory(0, {Record({{"x", FeatureValue::Real(-0.3)}}, 0),
                                    Record({{"x", FeatureValue::Real(-0.2)}}, 1),
                                    Record({{"x", FeatureValue::Real(-0.1)}}, 2)});
  EXPECT_NEAR(EvaluateReturn(spec, spec.defaults(), t), -0.6, 1e-12);

  Trajectory one = MakeTrajectory(1, {Record({{"x", FeatureValue::Real(0.25)}})});
  EXPECT_EQ(EvaluateReturn(spec, spec.defaults(), one),
            EvaluateReward(spec, spec.defaults(), one.features[0]));

  ParamVector zero = spec.defaults();
  zero.Set(0, 0.0);
  EXPECT_EQ(EvaluateReturn(spec, zero, t), 0.0);
}

TEST(EvaluateReturnTest, ErrorCarriesStepIndex) {
  const RewardSpec spec = testing::LinearSpec({"x"});
  Trajectory t = MakeTrajectory(0, {Record({{"x", FeatureValue::Real(1)}}, 0),
                                    Record({{"x", FeatureValue::Absent()}}, 1)});
  try {
    EvaluateReturn(spec, spec.defaults(), t);
    FAIL();
  } catch (const RewardError& e) {
    EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos);
  }
}

TEST(NormalizeTest, Examples) {
  ParamVector p;
  p.Add("a", 5.0, ParamDomain::Full(0, 10));
  p.Add("b", -2.0, ParamDomain::Full(-2, 8));
  p.Add("c", 8.0, ParamDomain::Full(-2, 8));
  const auto u = Normalize(p);
  EXPECT_DOUBLE_EQ(u[0], 0.5);
  EXPECT_DOUBLE_EQ(u[1], 0.0);
  EXPECT_DOUBLE_EQ(u[2], 1.0);

  ParamVector q;
  q.Add("t", 3.7, ParamDomain::Full(-2, 8));
  EXPECT_NEAR(Denormalize(q, Normalize(q)).value(0), 3.7, 1e-12);
}

TEST(NormalizeTest, OutOfDomainThrows) {
  ParamVector p;
  p.Add("a", 5.0, ParamDomain::Full(0, 10));
  p.Set(0, 11.0);
  EXPECT_THROW(Normalize(p), RewardError);
}

TEST(NormalizeProperty, RoundTripOnRandomParameters) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    double lo = u(rng), hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    if (hi - lo < 1e-3) hi = lo + 1.0;
    const double v = std::uniform_real_distribution<double>(lo, hi)(rng);
    ParamVector p;
    p.Add("p", v, ParamDomain::Full(lo, hi));
    EXPECT_LT(std::abs(Denormalize(p, Normalize(p)).value(0) - v), 1e-12);
  }
}

TEST(RewardProperty, LinearInWeights) {
  const RewardSpec spec = BuiltinSpec("pick-carry");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const FeatureRecord f = Record({{"distance_to_target", FeatureValue::Real(u(rng))},
                                    {"grasped", FeatureValue::Bool(u(rng) < 0.5)},
                                    {"distance_to_goal", FeatureValue::Real(u(rng))},
                                    {"collision", FeatureValue::Bool(u(rng) < 0.5)},
                                    {"action_magnitude", FeatureValue::Real(u(rng))}});
    ParamVector p = spec.defaults();
    for (std::size_t k = 0; k < p.size(); ++k) p.Set(k, 4.0 * u(rng));
    const double c = 2.5 * u(rng);
    ParamVector scaled = p;
    for (std::size_t k = 0; k < p.size(); ++k) scaled.Set(k, c * p.value(k));
    EXPECT_NEAR(EvaluateReward(spec, scaled, f), c * EvaluateReward(spec, p, f), 1e-12);
    ParamVector twice = p;
    for (std::size_t k = 0; k < p.size(); ++k) twice.Set(k, 2.0 * p.value(k));
    EXPECT_EQ(Relabel(f, spec, twice), 2.0 * EvaluateReward(spec, p, f));
    EXPECT_EQ(EvaluateReward(spec, p, f), EvaluateReward(spec, p, f));
  }
}

TEST(ReturnCoefficientsTest, DotProductMatchesReturn) {
  const RewardSpec spec = BuiltinSpec("open-drawer");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 0.3);
  std::vector<FeatureRecord> steps;
  for (int t = 0; t < 20; ++t) {
    steps.push_back(Record({{"distance_to_handle", FeatureValue::Real(u(rng))},
                            {"distance_to_goal", FeatureValue::Real(u(rng))},
                            {"contacted", FeatureValue::Bool(t % 3 == 0)},
                            {"collision", FeatureValue::Bool(t % 5 == 0)}},
                           t));
  }
  const auto coeff = ReturnCoefficients(spec, steps);
  ParamVector p = spec.defaults();
  double dot = 0;
  for (std::size_t k = 0; k < p.size(); ++k) dot += coeff[k] * p.value(k);
  EXPECT_NEAR(dot, EvaluateReturn(spec, p, steps), 1e-12);
}

TEST(RewardSpecTest, NamingRuleViolation) {
  RewardTerm t;
  t.name = "approach";
  t.weight_param = "w";
  t.feature = "d";
  ParamVector p;
  p.Add("w", 1.0, ParamDomain::Full(0, 1));
  try {
    RewardSpec("bad", {t}, p);
    FAIL();
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_NE(e.issues()[0].find("_reward"), std::string::npos);
  }
}

TEST(RewardSpecTest, FeatureSchemaCheck) {
  const RewardSpec spec = BuiltinSpec("pick-carry");
  const std::vector<std::string> partial = {"distance_to_target", "grasped"};
  EXPECT_THROW(spec.CheckFeatureSchema(partial), ValidationError);
}

TEST(ParamVectorTest, DomainsAndLayout) {
  ParamVector p;
  p.Add("a", 1.0, ParamDomain::Full(0, 2));
  EXPECT_THROW(p.Add("a", 1.0, ParamDomain::Full(0, 2)), ConfigError);
  EXPECT_THROW(p.Add("b", 3.0, ParamDomain::Full(0, 2)), ConfigError);
  EXPECT_THROW(ParamDomain::Full(1, 1), ConfigError);
  ParamVector copy = p;
  EXPECT_TRUE(copy.SameLayout(p));
  copy.domain(0).active_min = 1.5;
  EXPECT_FALSE(copy.InActiveDomain());
  copy.RestoreDomains();
  EXPECT_TRUE(copy.InActiveDomain());
}

}  // namespace
}  // namespace selfalign
