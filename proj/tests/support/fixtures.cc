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

#include "support/fixtures.h"

namespace selfalign::testing {

FeatureRecord Record(std::initializer_list<NamedValue> values, int step) {
  FeatureRecord r(step);
  for (const auto& [name, value] : values) r.Set(name, value);
  return r;
}

Trajectory MakeTrajectory(std::int64_t id, std::vector<FeatureRecord> records) {
  Trajectory t;
  t.id = id;
  t.states.assign(records.size(), {});
  t.actions.assign(records.size(), {});
  t.features = std::move(records);
  return t;
}

Trajectory ScalarTrajectory(std::int64_t id, double value) {
  return MakeTrajectory(id, {Record({{"x", FeatureValue::Real(value)}})});
}

RewardSpec LinearSpec(const std::vector<std::string>& features, double lo, double hi) {
  std::vector<RewardTerm> terms;
  ParamVector params;
  for (const auto& f : features) {
    RewardTerm t;
    t.name = f + "_reward";
    t.weight_param = "w_" + f;
    t.form = ExpressionForm::kFeature;
    t.feature = f;
    terms.push_back(t);
    params.Add("w_" + f, 1.0, ParamDomain::Full(lo, hi));
  }
  return RewardSpec("linear", std::move(terms), std::move(params));
}

namespace {

FeatureRecord DrawerRecord(double to_handle, bool contacted, double joint) {
  return Record({{"distance_to_handle", FeatureValue::Real(to_handle)},
                 {"contacted", FeatureValue::Bool(contacted)},
                 {"drawer_joint_value", FeatureValue::Real(joint)},
                 {"distance_to_goal", FeatureValue::Real(0.5 - joint)},
                 {"collision", FeatureValue::Bool(false)},
                 {"action_magnitude", FeatureValue::Real(0.1)}});
}

}  // namespace

std::vector<Trajectory> DrawerExampleBatch() {
  return {MakeTrajectory(1, {DrawerRecord(0.30, false, 0.0), DrawerRecord(0.10, false, 0.0)}),
          MakeTrajectory(2, {DrawerRecord(0.20, false, 0.0), DrawerRecord(0.00, true, 0.15)}),
          MakeTrajectory(4, {DrawerRecord(0.35, false, 0.0), DrawerRecord(0.25, false, 0.0)}),
          MakeTrajectory(5, {DrawerRecord(0.10, false, 0.0), DrawerRecord(0.00, true, 0.40)})};
}

}  // namespace selfalign::testing
