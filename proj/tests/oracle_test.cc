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

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "selfalign/envs.h"
#include "selfalign/errors.h"
#include "selfalign/oracle.h"
#include "selfalign/reward_io.h"
#include "support/fixtures.h"

namespace selfalign {
namespace {

using testing::DrawerExampleBatch;
using testing::MakeTrajectory;
using testing::Record;

ScriptedOracleConfig NoiseOff() {
  ScriptedOracleConfig c;
  c.swap = SwapModel::kNone;
  return c;
}

TEST(DescribeExecutionTest, FourDecimalReals) {
  const auto batch = std::vector<Trajectory>{MakeTrajectory(
      9, {Record({{"drawer_joint_value", FeatureValue::Real(0.0)},
                  {"distance_to_drawer", FeatureValue::Real(0.0589)},
                  {"alignment", FeatureValue::Real(0.9999)}})})};
  const auto d = DescribeExecution(batch);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].line,
            "data sample 0: drawer_joint_value = 0.0000, distance_to_drawer = 0.0589, "
            "alignment = 0.9999.");
  EXPECT_EQ(d[0].trajectory_id, 9);
}

TEST(DescribeExecutionTest, BooleansAndAbsentValues) {
  EXPECT_EQ(DescribeFeatures(2, Record({{"grasped", FeatureValue::Bool(false)}})),
            "data sample 2: grasped = False.");
  EXPECT_EQ(DescribeFeatures(0, Record({{"peg_to_hole_distance", FeatureValue::Absent()}})),
            "data sample 0: peg_to_hole_distance = None.");
}

TEST(DescribeExecutionTest, UsesLastStepInBatchOrder) {
  const auto batch = DrawerExampleBatch();
  const auto d = DescribeExecution(batch);
  ASSERT_EQ(d.size(), 4u);
  EXPECT_EQ(d[3].sample_index, 3);
  EXPECT_NE(d[3].line.find("drawer_joint_value = 0.4000"), std::string::npos);
  EXPECT_EQ(JoinDescriptions(d).substr(0, 18), "  - data sample 0:");
}

TEST(DescribeExecutionTest, EmptyRecordIsAnError) {
  std::vector<Trajectory> batch{MakeTrajectory(1, {FeatureRecord()})};
  EXPECT_THROW(DescribeExecution(batch), std::invalid_argument);
  batch[0].features.clear();
  EXPECT_THROW(DescribeExecution(batch), std::invalid_argument);
}

TEST(DescribeExecutionProperty, InjectiveAtFourDecimals) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> ticks(0, 9999);
  std::set<std::pair<int, int>> seen;
  std::set<std::string> lines;
  for (int i = 0; i < 3000; ++i) {
    const int a = ticks(rng), b = ticks(rng);
    if (!seen.insert({a, b}).second) continue;
    lines.insert(DescribeFeatures(0, Record({{"a", FeatureValue::Real(a / 1e4)},
                                             {"b", FeatureValue::Real(b / 1e4)}})));
  }
  EXPECT_EQ(lines.size(), seen.size());
}

TEST(ScriptedRankTest, DrawerWorkedExample) {
  const auto env = MakeEnv("drawer-pull-1d");
  const auto batch = DrawerExampleBatch();
  const Ranking r = ScriptedRank(batch, env->spec().stage_rules, NoiseOff());
  EXPECT_EQ(r.ids, (std::vector<std::int64_t>{5, 2, 1, 4}));
  EXPECT_EQ(r.provenance, RankingProvenance::kOracle);
}

TEST(ScriptedRankTest, SingleStageIsPureSort) {
  const auto env = MakeEnv("point-reach");
  std::vector<Trajectory> batch;
  const std::vector<double> d{0.4, 0.1, 0.3, 0.2};
  for (std::size_t i = 0; i < d.size(); ++i) {
    batch.push_back(MakeTrajectory(
        10 + static_cast<std::int64_t>(i), {Record({{"distance_to_target", FeatureValue::Real(d[i])},
                                                    {"action_magnitude", FeatureValue::Real(0.0)}})}));
  }
  EXPECT_EQ(ScriptedRank(batch, env->spec().stage_rules, NoiseOff()).ids,
            (std::vector<std::int64_t>{11, 13, 12, 10}));
}

TEST(ScriptedRankTest, NoMatchingStageListsPredicates) {
  const auto env = MakeEnv("drawer-pull-1d");
  std::vector<Trajectory> batch{MakeTrajectory(1, {Record({{"other", FeatureValue::Real(1)}})})};
  try {
    ScriptedRank(batch, env->spec().stage_rules, NoiseOff());
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("reaching"), std::string::npos) << e.what();
  }
}

TEST(ScriptedRankTest, EqualScoresSwapHalfTheTime) {
  const auto env = MakeEnv("drawer-pull-1d");
  auto batch = DrawerExampleBatch();
  batch.resize(2);
  batch[1] = batch[0];
  batch[1].id = 7;
  ScriptedOracleConfig c;
  c.beta = 0.9;
  int swapped = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    c.seed = static_cast<std::uint64_t>(t);
    swapped += ScriptedRank(batch, env->spec().stage_rules, c).ids.front() == 7;
  }
  EXPECT_NEAR(static_cast<double>(swapped) / trials, 0.5, 0.02);
}

FeatureRecord DrawerFeatures(double handle, bool contacted, double q) {
  return Record({{"distance_to_handle", FeatureValue::Real(handle)},
                 {"contacted", FeatureValue::Bool(contacted)},
                 {"drawer_joint_value", FeatureValue::Real(q)},
                 {"distance_to_goal", FeatureValue::Real(0.5 - q)},
                 {"collision", FeatureValue::Bool(false)},
                 {"action_magnitude", FeatureValue::Real(0.0)}});
}

std::vector<Trajectory> RandomDrawerBatch(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 0.5);
  std::vector<Trajectory> batch;
  for (int i = 0; i < n; ++i) {
    const bool pulling = rng() % 2;
    // Quantized values so ties occur.
    const double v = std::round(u(rng) * 20) / 20;
    batch.push_back(MakeTrajectory(100 + i, {pulling ? DrawerFeatures(0.0, true, v)
                                                     : DrawerFeatures(v, false, 0.0)}));
  }
  return batch;
}

// Reference ordering computed directly from the drawer stage semantics.
std::vector<std::int64_t> ReferenceDrawerOrder(const std::vector<Trajectory>& batch) {
  std::vector<std::size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto key = [&](std::size_t i) {
    const auto& f = batch[i].features.back();
    const bool pulling = f.Find("contacted")->AsBool() ||
                         f.Find("drawer_joint_value")->AsReal() >= drawer_pull::kMovedThreshold;
    const double score = pulling ? f.Find("drawer_joint_value")->AsReal()
                                 : -f.Find("distance_to_handle")->AsReal();
    return std::make_pair(pulling ? 1 : 0, score);
  };
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return key(a) > key(b);
  });
  std::vector<std::int64_t> ids;
  for (auto i : idx) ids.push_back(batch[i].id);
  return ids;
}

TEST(ScriptedRankProperty, NoiseOffMatchesStageSortOnAllPermutations) {
  const auto env = MakeEnv("drawer-pull-1d");
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    auto batch = RandomDrawerBatch(rng, 5);
    std::vector<int> perm{0, 1, 2, 3, 4};
    do {
      std::vector<Trajectory> permuted;
      for (int p : perm) permuted.push_back(batch[p]);
      ASSERT_EQ(ScriptedRank(permuted, env->spec().stage_rules, NoiseOff()).ids,
                ReferenceDrawerOrder(permuted));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST(ScriptedRankProperty, AlwaysAPermutation) {
  const auto env = MakeEnv("drawer-pull-1d");
  std::mt19937_64 rng(13);
  for (double beta : {0.0, 0.01, 0.9, 10.0, 1e6}) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto batch = RandomDrawerBatch(rng, 1 + trial % 8);
      ScriptedOracleConfig c;
      c.beta = beta;
      c.seed = static_cast<std::uint64_t>(trial);
      auto ids = ScriptedRank(batch, env->spec().stage_rules, c).ids;
      std::vector<std::int64_t> expected;
      for (const auto& t : batch) expected.push_back(t.id);
      std::sort(ids.begin(), ids.end());
      ASSERT_EQ(ids, expected);
    }
  }
}

TEST(ScriptedRankProperty, SwapsStayWithinStage) {
  const auto env = MakeEnv("drawer-pull-1d");
  std::mt19937_64 rng(14);
  ScriptedOracleConfig c;
  c.beta = 0.0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto batch = RandomDrawerBatch(rng, 6);
    c.seed = static_cast<std::uint64_t>(trial);
    const auto ids = ScriptedRank(batch, env->spec().stage_rules, c).ids;
    bool seen_reaching = false;
    for (auto id : ids) {
      const auto& f = batch[id - 100].features.back();
      const bool pulling = f.Find("contacted")->AsBool();
      if (!pulling) seen_reaching = true;
      ASSERT_FALSE(pulling && seen_reaching);
    }
  }
}

TEST(ScriptedReflectTest, AdviceFollowsFurthestStage) {
  const auto env = MakeEnv("drawer-pull-1d");
  const RewardSpec spec = BuiltinSpec("open-drawer");
  auto batch = DrawerExampleBatch();
  auto reflection = ScriptedReflect(batch, env->spec(), spec);
  for (const auto& [name, dir] : reflection) {
    EXPECT_TRUE(spec.defaults().IndexOf(name).has_value()) << name;
  }
  batch.resize(1);
  const auto reaching = ScriptedReflect(batch, env->spec(), spec);
  EXPECT_NE(reaching, reflection);
}

TEST(ScriptedReflectTest, EmptyBatchIsAnError) {
  const auto env = MakeEnv("drawer-pull-1d");
  EXPECT_THROW(ScriptedReflect({}, env->spec(), BuiltinSpec("open-drawer")),
               std::invalid_argument);
}

TEST(ScriptedOracleTest, DeterministicGivenSeed) {
  const auto env = MakeEnv("drawer-pull-1d");
  ScriptedOracle oracle(env->spec(), ScriptedOracleConfig{});
  const RewardSpec spec = BuiltinSpec("open-drawer");
  std::mt19937_64 rng(15);
  const auto batch = RandomDrawerBatch(rng, 8);
  EXPECT_EQ(oracle.Rank(batch, spec, spec.defaults(), 3).ranking,
            oracle.Rank(batch, spec, spec.defaults(), 3).ranking);
  EXPECT_EQ(oracle.tokens_used(), 0u);
}

}  // namespace
}  // namespace selfalign
