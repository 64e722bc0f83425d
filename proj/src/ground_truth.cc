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

#include "selfalign/ground_truth.h"

#include <atomic>
#include <cmath>

#include "selfalign/errors.h"

namespace selfalign {
namespace {

std::atomic<std::uint64_t> g_calls{0};

constexpr double kSuccessBonus = 1000.0;

double Progress(double distance) { return 1.0 - std::tanh(5.0 * distance); }

double Real(const FeatureRecord& f, const char* name) {
  return f.Find(name)->AsReal();
}

}  // namespace

double GroundTruthReward(const Env& env, const State& state) {
  g_calls.fetch_add(1, std::memory_order_relaxed);
  const FeatureRecord f = env.Features(state, 0);
  const std::string& name = env.spec().name;
  if (name == "point-reach") {
    return Progress(Real(f, "distance_to_target"));
  }
  if (name == "pick-carry") {
    if (Real(f, "grasped") == 0.0) return Progress(Real(f, "distance_to_target"));
    return 2.0 + Progress(Real(f, "distance_to_goal"));
  }
  if (name == "drawer-pull-1d") {
    const double q = Real(f, "drawer_joint_value");
    if (Real(f, "contacted") == 0.0 && q < drawer_pull::kMovedThreshold) {
      return Progress(Real(f, "distance_to_handle"));
    }
    return 2.0 + q / drawer_pull::kMaxOpening;
  }
  throw Error("no ground-truth reward for environment " + name);
}

double GroundTruthReturn(const Env& env, const Trajectory& traj) {
  double total = 0.0;
  for (const auto& s : traj.states) total += GroundTruthReward(env, s);
  if (!traj.states.empty() && env.SuccessState(traj.states.back())) total += kSuccessBonus;
  return total;
}

std::uint64_t GroundTruthCallCount() { return g_calls.load(); }

}  // namespace selfalign
