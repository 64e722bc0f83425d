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

#include "selfalign/envs.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "selfalign/errors.h"

namespace selfalign {

bool StageCondition::Holds(const FeatureRecord& features) const {
  const FeatureValue* v = features.Find(feature);
  if (v == nullptr || v->is_absent()) return false;
  switch (op) {
    case Op::kIsTrue:
      return v->AsBool();
    case Op::kIsFalse:
      return !v->AsBool();
    case Op::kLess:
      return v->AsReal() < threshold;
    case Op::kGreaterEqual:
      return v->AsReal() >= threshold;
  }
  return false;
}

std::string StageCondition::Describe() const {
  switch (op) {
    case Op::kIsTrue:
      return feature;
    case Op::kIsFalse:
      return "not " + feature;
    case Op::kLess:
      return fmt::format("{} < {}", feature, threshold);
    case Op::kGreaterEqual:
      return fmt::format("{} >= {}", feature, threshold);
  }
  return feature;
}

bool StageRule::Matches(const FeatureRecord& features) const {
  for (const auto& clause : any_of) {
    bool all = true;
    for (const auto& c : clause) all = all && c.Holds(features);
    if (all) return true;
  }
  return false;
}

double StageRule::Score(const FeatureRecord& features) const {
  const FeatureValue* v = features.Find(score_feature);
  if (v == nullptr || v->is_absent()) {
    throw Error(fmt::format("stage '{}': score feature {} unavailable", name, score_feature));
  }
  const double s = v->AsReal() * score_scale;
  return direction == ScoreDirection::kHigherBetter ? s : -s;
}

std::string StageRule::Describe() const {
  std::string out = fmt::format("stage {} '{}': ", stage, name);
  for (std::size_t i = 0; i < any_of.size(); ++i) {
    if (i > 0) out += " or ";
    out += "(";
    for (std::size_t j = 0; j < any_of[i].size(); ++j) {
      if (j > 0) out += " and ";
      out += any_of[i][j].Describe();
    }
    out += ")";
  }
  return out;
}

std::vector<std::string> EnvSpec::FeatureNames() const {
  std::vector<std::string> out;
  for (const auto& f : features) out.push_back(f.name);
  return out;
}

bool Env::Success(const Trajectory& traj) const {
  if (traj.states.empty()) return false;
  return SuccessState(traj.states.back());
}

std::vector<double> Env::ClipAction(std::span<const double> action) const {
  const EnvSpec& s = spec();
  if (static_cast<int>(action.size()) != s.action_dim) {
    throw std::invalid_argument(fmt::format("{}: action has {} components, expected {}",
                                            s.name, action.size(), s.action_dim));
  }
  std::vector<double> out(action.begin(), action.end());
  for (double& a : out) a = std::clamp(a, s.action_low, s.action_high);
  return out;
}

namespace {

using Op = StageCondition::Op;

double Hypot(double x, double y) { return std::sqrt(x * x + y * y); }

// ---------------------------------------------------------------- point-reach

class PointReach : public Env {
 public:
  explicit PointReach(double spread) : spread_(spread) {
    spec_.name = "point-reach";
    spec_.task_description = "move the end effector to the target position";
    spec_.state_dim = 4;
    spec_.observation_dim = 2;
    spec_.action_dim = 2;
    spec_.horizon = point_reach::kHorizon;
    spec_.terminate_on_success = true;
    spec_.features = {{"distance_to_target", FeatureKind::kReal}};
    spec_.success_description = "distance_to_target < 0.05";
    spec_.stage_rules = {{0, "reaching", {{}}, "distance_to_target",
                          ScoreDirection::kLowerBetter, 100.0}};
    spec_.reflection_advice = {{0, {{"approach_weight", Direction::kIncrease}}}};
  }

  const EnvSpec& spec() const override { return spec_; }

  // state: x, y, target_x, target_y
  State Reset(std::uint64_t seed) const override {
    if (spread_ == 0.0) return {0.0, 0.0, 0.75, 0.0};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> radius(point_reach::kSpawnMin,
                                                  point_reach::kSpawnMax);
    const double a = angle(rng);
    const double r = radius(rng);
    return {0.0, 0.0, r * std::cos(a), r * std::sin(a)};
  }

  StepResult Step(const State& s, std::span<const double> action, int step) const override {
    const auto a = ClipAction(action);
    StepResult out;
    out.state = s;
    out.state[0] += point_reach::kStepScale * a[0];
    out.state[1] += point_reach::kStepScale * a[1];
    out.features = Features(out.state, step);
    out.done = step + 1 >= spec_.horizon || SuccessState(out.state);
    return out;
  }

  std::vector<double> Observe(const State& s) const override {
    return {s[2] - s[0], s[3] - s[1]};
  }

  bool SuccessState(const State& s) const override {
    return Hypot(s[2] - s[0], s[3] - s[1]) < point_reach::kSuccessDistance;
  }

  FeatureRecord Features(const State& s, int step) const override {
    FeatureRecord f(step);
    f.Set("distance_to_target", FeatureValue::Real(Hypot(s[2] - s[0], s[3] - s[1])));
    return f;
  }

 private:
  double spread_;
  EnvSpec spec_;
};

// ----------------------------------------------------------------- pick-carry

class PickCarry : public Env {
 public:
  PickCarry() {
    using namespace pick_carry;
    spec_.name = "pick-carry";
    spec_.task_description = "pick cube object and transport to the target position";
    spec_.state_dim = kDim;
    spec_.observation_dim = 5;
    spec_.action_dim = 3;
    spec_.horizon = kHorizon;
    spec_.terminate_on_success = false;
    spec_.features = {{"distance_to_target", FeatureKind::kReal},
                      {"grasped", FeatureKind::kBool},
                      {"distance_to_goal", FeatureKind::kReal},
                      {"collision", FeatureKind::kBool},
                      {"action_magnitude", FeatureKind::kReal}};
    spec_.success_description = "grasped and distance_to_goal < 0.05 at the final step";
    spec_.stage_rules = {
        {0, "approach", {{{"grasped", Op::kIsFalse}}}, "distance_to_target",
         ScoreDirection::kLowerBetter, 100.0},
        {1, "transport",
         {{{"grasped", Op::kIsTrue}, {"distance_to_goal", Op::kGreaterEqual, kSuccessDistance}}},
         "distance_to_goal", ScoreDirection::kLowerBetter, 100.0},
        {2, "placed",
         {{{"grasped", Op::kIsTrue}, {"distance_to_goal", Op::kLess, kSuccessDistance}}},
         "distance_to_goal", ScoreDirection::kLowerBetter, 100.0},
    };
    spec_.reflection_advice = {
        {0, {{"grasp_weight", Direction::kIncrease}, {"transport_weight", Direction::kIncrease}}},
        {1, {{"transport_weight", Direction::kIncrease}}},
        {2, {{"transport_weight", Direction::kIncrease}}},
    };
  }

  const EnvSpec& spec() const override { return spec_; }

  // Gripper starts at the origin; the cube spawns 0.4-0.7 away, the goal
  // 0.4-0.8 from the origin and at least 0.3 from the cube.
  State Reset(std::uint64_t seed) const override {
    using namespace pick_carry;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> obj_r(0.4, 0.7);
    std::uniform_real_distribution<double> goal_r(0.4, 0.8);
    State s(kDim, 0.0);
    const double oa = angle(rng), orad = obj_r(rng);
    s[kOx] = orad * std::cos(oa);
    s[kOy] = orad * std::sin(oa);
    for (int tries = 0; tries < 100; ++tries) {
      const double ga = angle(rng), gr = goal_r(rng);
      s[kGx] = gr * std::cos(ga);
      s[kGy] = gr * std::sin(ga);
      if (Hypot(s[kGx] - s[kOx], s[kGy] - s[kOy]) >= 0.3) return s;
    }
    s[kGx] = -s[kOx];
    s[kGy] = -s[kOy];
    return s;
  }

  StepResult Step(const State& s, std::span<const double> action, int step) const override {
    using namespace pick_carry;
    const auto a = ClipAction(action);
    State n = s;
    double px = s[kPx] + kStepScale * a[0];
    double py = s[kPy] + kStepScale * a[1];
    const double cx = std::clamp(px, -kWorkspace, kWorkspace);
    const double cy = std::clamp(py, -kWorkspace, kWorkspace);
    n[kCollision] = (cx != px || cy != py) ? 1.0 : 0.0;
    n[kPx] = cx;
    n[kPy] = cy;
    n[kActionMag] = Hypot(a[0], a[1]);
    const bool closing = a[2] > 0.0;
    bool grasped = s[kGrasped] != 0.0;
    if (!closing) {
      grasped = false;
    } else if (!grasped && Hypot(cx - s[kOx], cy - s[kOy]) < kGraspRadius) {
      grasped = true;
    }
    if (grasped) {
      n[kOx] = cx;
      n[kOy] = cy;
    }
    n[kGrasped] = grasped ? 1.0 : 0.0;
    StepResult out;
    out.features = Features(n, step);
    out.state = std::move(n);
    out.done = step + 1 >= spec_.horizon;
    return out;
  }

  std::vector<double> Observe(const State& s) const override {
    using namespace pick_carry;
    const double g = s[kGrasped];
    return {(1.0 - g) * (s[kOx] - s[kPx]), (1.0 - g) * (s[kOy] - s[kPy]),
            g * (s[kGx] - s[kOx]), g * (s[kGy] - s[kOy]), g};
  }

  bool SuccessState(const State& s) const override {
    using namespace pick_carry;
    return s[kGrasped] != 0.0 &&
           Hypot(s[kGx] - s[kOx], s[kGy] - s[kOy]) < kSuccessDistance;
  }

  FeatureRecord Features(const State& s, int step) const override {
    using namespace pick_carry;
    FeatureRecord f(step);
    f.Set("distance_to_target", FeatureValue::Real(Hypot(s[kOx] - s[kPx], s[kOy] - s[kPy])));
    f.Set("grasped", FeatureValue::Bool(s[kGrasped] != 0.0));
    f.Set("distance_to_goal", FeatureValue::Real(Hypot(s[kGx] - s[kOx], s[kGy] - s[kOy])));
    f.Set("collision", FeatureValue::Bool(s[kCollision] != 0.0));
    f.Set("action_magnitude", FeatureValue::Real(s[kActionMag]));
    return f;
  }

 private:
  EnvSpec spec_;
};

// ------------------------------------------------------------- drawer-pull-1d

class DrawerPull : public Env {
 public:
  DrawerPull() {
    using namespace drawer_pull;
    spec_.name = "drawer-pull-1d";
    spec_.task_description = "open cabinet drawer as much as possible";
    spec_.state_dim = kDim;
    spec_.observation_dim = 3;
    spec_.action_dim = 2;
    spec_.horizon = kHorizon;
    spec_.terminate_on_success = false;
    spec_.features = {{"distance_to_handle", FeatureKind::kReal},
                      {"contacted", FeatureKind::kBool},
                      {"drawer_joint_value", FeatureKind::kReal},
                      {"distance_to_goal", FeatureKind::kReal},
                      {"collision", FeatureKind::kBool},
                      {"action_magnitude", FeatureKind::kReal}};
    spec_.success_description = "drawer_joint_value >= 0.45 at the final step";
    spec_.stage_rules = {
        {0, "reaching",
         {{{"contacted", Op::kIsFalse}, {"drawer_joint_value", Op::kLess, kMovedThreshold}}},
         "distance_to_handle", ScoreDirection::kLowerBetter, 100.0},
        {1, "pulling",
         {{{"contacted", Op::kIsTrue}},
          {{"drawer_joint_value", Op::kGreaterEqual, kMovedThreshold}}},
         "drawer_joint_value", ScoreDirection::kHigherBetter, 100.0},
    };
    spec_.reflection_advice = {
        {0, {{"grasp_weight", Direction::kIncrease}, {"pull_weight", Direction::kIncrease}}},
        {1, {{"pull_weight", Direction::kIncrease}}},
    };
  }

  const EnvSpec& spec() const override { return spec_; }

  // The gripper starts 0.0-0.4 along the rail; the drawer is closed with its
  // handle at 1.0 and opens towards the gripper.
  State Reset(std::uint64_t seed) const override {
    using namespace drawer_pull;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> start(0.0, 0.4);
    State s(kDim, 0.0);
    s[kX] = start(rng);
    return s;
  }

  StepResult Step(const State& s, std::span<const double> action, int step) const override {
    using namespace drawer_pull;
    const auto a = ClipAction(action);
    const bool closing = a[1] > 0.0;
    State n = s;
    double x = s[kX] + kStepScale * a[0];
    double q = s[kQ];
    bool collision = false;
    if (s[kContacted] != 0.0 && closing) {
      q = std::clamp(kClosedHandle - x, 0.0, kMaxOpening);
      x = std::min(x, kClosedHandle - q);
    } else {
      const double handle = kClosedHandle - q;
      if (x > handle) {
        collision = true;
        x = handle;
      }
    }
    const double handle = kClosedHandle - q;
    n[kX] = x;
    n[kQ] = q;
    n[kContacted] = (closing && std::abs(handle - x) < kContactRadius) ? 1.0 : 0.0;
    n[kCollision] = collision ? 1.0 : 0.0;
    n[kActionMag] = std::abs(a[0]);
    StepResult out;
    out.features = Features(n, step);
    out.state = std::move(n);
    out.done = step + 1 >= spec_.horizon;
    return out;
  }

  std::vector<double> Observe(const State& s) const override {
    using namespace drawer_pull;
    const double c = s[kContacted];
    return {(1.0 - c) * (kClosedHandle - s[kQ] - s[kX]), c, c * (kMaxOpening - s[kQ])};
  }

  bool SuccessState(const State& s) const override {
    return s[drawer_pull::kQ] >= drawer_pull::kSuccessOpening;
  }

  FeatureRecord Features(const State& s, int step) const override {
    using namespace drawer_pull;
    FeatureRecord f(step);
    f.Set("distance_to_handle", FeatureValue::Real(std::abs(kClosedHandle - s[kQ] - s[kX])));
    f.Set("contacted", FeatureValue::Bool(s[kContacted] != 0.0));
    f.Set("drawer_joint_value", FeatureValue::Real(s[kQ]));
    f.Set("distance_to_goal", FeatureValue::Real(kMaxOpening - s[kQ]));
    f.Set("collision", FeatureValue::Bool(s[kCollision] != 0.0));
    f.Set("action_magnitude", FeatureValue::Real(s[kActionMag]));
    return f;
  }

 private:
  EnvSpec spec_;
};

}  // namespace

std::unique_ptr<Env> MakePointReach(double spawn_spread) {
  return std::make_unique<PointReach>(spawn_spread);
}

std::unique_ptr<Env> MakeEnv(const std::string& name) {
  if (name == "point-reach") return MakePointReach();
  if (name == "pick-carry") return std::make_unique<PickCarry>();
  if (name == "drawer-pull-1d") return std::make_unique<DrawerPull>();
  throw ConfigError("unknown environment: " + name);
}

std::vector<std::string> EnvNames() {
  return {"point-reach", "pick-carry", "drawer-pull-1d"};
}

}  // namespace selfalign
