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

#ifndef SELFALIGN_TRAJECTORY_LOG_H_
#define SELFALIGN_TRAJECTORY_LOG_H_

#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "selfalign/reward.h"

namespace selfalign {

// One JSON object per step:
//   {"traj": id, "step": t, "state": [...], "action": [...], "features": {...}}
// Feature values are numbers, booleans, or null for absent. Reals keep full
// round-trip precision.
nlohmann::ordered_json StepRecord(const Trajectory& traj, std::size_t step);
nlohmann::ordered_json FeaturesToJson(const FeatureRecord& features);
FeatureRecord FeaturesFromJson(const nlohmann::ordered_json& doc, int step);

// Writes one line per step.
void WriteTrajectoryLog(std::ostream& out, const Trajectory& traj);

// Reads step lines back into trajectories in order of first appearance.
// Lines carrying a "kind" field belong to other record types and are
// skipped. Success flags are not part of step lines and stay false.
// Throws ConfigError naming the line on malformed input.
std::vector<Trajectory> ReadTrajectoryLog(std::istream& in);

}  // namespace selfalign

#endif  // SELFALIGN_TRAJECTORY_LOG_H_
