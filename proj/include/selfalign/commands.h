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

#ifndef SELFALIGN_COMMANDS_H_
#define SELFALIGN_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "selfalign/envs.h"
#include "selfalign/loop.h"
#include "selfalign/oracle.h"
#include "selfalign/run_config.h"

namespace selfalign {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

// Documented CSV headers. params.csv continues with one column per
// parameter in spec order.
inline constexpr const char* kMetricsHeader =
    "iteration,inconsistency_before,inconsistency_after,success_rate,accepted,adjustment_fired";
inline constexpr const char* kCompareHeader = "condition,seed,iteration,success_rate";

// Oracle for one seed. The LLM backend reads its key from the configured
// environment variable; a missing variable is a ConfigError.
std::shared_ptr<Oracle> MakeOracle(const RunConfig& config, const EnvSpec& env,
                                   std::uint64_t seed);

// Runs one seed and writes its run directory:
//   config.json, reward_spec.json, metrics.csv, params.csv, summary.json,
//   oracle/NNN.txt, batches/NNN.jsonl
// An explicit oracle overrides the one described by the config.
ExperimentResult RunSeed(const RunConfig& config, std::uint64_t seed,
                         const std::filesystem::path& dir,
                         std::shared_ptr<Oracle> oracle = nullptr);

// Directory of one seed below config.out.
std::filesystem::path SeedDirectory(const RunConfig& config, std::uint64_t seed);

// Runs every seed. Diagnostics go to `err`, one progress line per seed to
// `out`.
int CmdRun(const RunConfig& config, std::ostream& out, std::ostream& err);

// Recomputes returns and inconsistency counts of a run directory from its
// logged batches and parameters and compares them with metrics.csv.
int CmdReplay(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

// Merges success-rate curves of several run directories (seed directories
// or parents of seed_* directories) into one CSV written to `out`.
int CmdCompare(const std::vector<std::filesystem::path>& dirs, std::ostream& out,
               std::ostream& err);

}  // namespace selfalign

#endif  // SELFALIGN_COMMANDS_H_
