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

#ifndef SELFALIGN_TESTS_SUPPORT_FIXTURES_H_
#define SELFALIGN_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "selfalign/reward.h"

namespace selfalign::testing {

using NamedValue = std::pair<std::string, FeatureValue>;

FeatureRecord Record(std::initializer_list<NamedValue> values, int step = 0);

// Trajectory whose per-step records are `records`; states and actions are
// empty placeholders of matching length.
Trajectory MakeTrajectory(std::int64_t id, std::vector<FeatureRecord> records);

// Single-step trajectory with one real feature "x" equal to `value`.
Trajectory ScalarTrajectory(std::int64_t id, double value);

// r = sum_k w_k * f_k with one "feature" term per name, weights "w_<name>"
// defaulting to 1 on [lo, hi].
RewardSpec LinearSpec(const std::vector<std::string>& features, double lo = 0.0,
                      double hi = 10.0);

// drawer-pull-1d batch with ids 1, 2, 4, 5: trajectories 1 and 4 still
// reaching (4 further from the handle), 2 and 5 pulling (5 opened further).
std::vector<Trajectory> DrawerExampleBatch();

}  // namespace selfalign::testing

#endif  // SELFALIGN_TESTS_SUPPORT_FIXTURES_H_
