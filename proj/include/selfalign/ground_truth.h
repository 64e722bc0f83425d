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

#ifndef SELFALIGN_GROUND_TRUTH_H_
#define SELFALIGN_GROUND_TRUTH_H_

#include <cstdint>

#include "selfalign/envs.h"
#include "selfalign/reward.h"

namespace selfalign {

// Hidden staged reward for each shipped environment: dense progress within
// the current stage, an offset per completed stage, and a terminal bonus on
// success large enough that any success outranks any failure. Only oracles
// and evaluation code may link this library.
double GroundTruthReward(const Env& env, const State& state);
double GroundTruthReturn(const Env& env, const Trajectory& traj);

// Number of ground-truth evaluations since process start.
std::uint64_t GroundTruthCallCount();

}  // namespace selfalign

#endif  // SELFALIGN_GROUND_TRUTH_H_
