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

#include "selfalign/loop.h"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "selfalign/errors.h"
#include "selfalign/seeding.h"

namespace selfalign {
namespace {

// Sub-stream tags for DeriveSeed(config.seed, {iteration, tag}).
enum SeedTag : std::uint64_t {
  kTrain = 1,
  kRollout,
  kHistogram,
  kOracle,
  kDataset,
  kUpdate,
  kReflect,
  kAdjust,
};
constexpr std::uint64_t kEvaluationBlock = 0x5eed0e7a1ULL;

// Width of the open end of a direction-restricted domain, relative to the
// full range.
constexpr double kOpenBoundFraction = 1e-9;

}  // namespace

void AlignmentConfig::Validate() const {
  if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  if (!(adjustment_threshold >= 0.0 && adjustment_threshold <= 1.0)) {
    throw ConfigError("adjustment_threshold must lie in [0, 1]");
  }
  if (!(target_success >= 0.0 && target_success <= 1.0)) {
    throw ConfigError("target_success must lie in [0, 1]");
  }
  if (rollout_samples < 1 || histogram_samples < 0 ||
      rollout_samples + histogram_samples < 2) {
    throw ConfigError("rollout_samples >= 1 and rollout_samples + histogram_samples >= 2");
  }
  if (histogram_bins < 1) throw ConfigError("histogram_bins must be >= 1");
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (radii.empty()) throw ConfigError("radii must be nonempty");
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("radii must be positive");
  }
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  if (buffer_capacity < 1) throw ConfigError("buffer_capacity must be >= 1");
  mh.Validate();
  cem.Validate();
}

AlignmentRun::AlignmentRun(const Env& env, RewardSpec spec, ParamVector params,
                           std::shared_ptr<Oracle> oracle, AlignmentConfig config)
    : env_(env),
      spec_(std::move(spec)),
      params_(std::move(params)),
      oracle_(std::move(oracle)),
      config_(std::move(config)),
      policy_(LinearPolicy::Zeros(env.spec())),
      buffer_((config_.Validate(), config_.buffer_capacity)) {
  if (!oracle_) throw ConfigError("an oracle is required");
  const auto schema = env_.spec().FeatureNames();
  spec_.CheckFeatureSchema(schema);
  try {
    spec_.CheckConforms(params_);
  } catch (const RewardError& e) {
    throw ConfigError(e.what());
  }
  if (!params_.InFullDomain()) throw ConfigError("initial parameters lie outside their domains");
  params_.RestoreDomains();
}

double AlignmentRun::EvaluateSuccess() const {
  return EvaluateSuccessRate(env_, policy_, config_.eval_episodes,
                             DeriveSeed(config_.seed, {kEvaluationBlock}));
}

IterationReport AlignmentRun::RunIteration() {
  const std::uint64_t k = static_cast<std::uint64_t>(++iteration_);
  IterationReport report;
  report.iteration = iteration_;
  report.params_before = params_;

  CEMConfig cem = config_.cem;
  cem.seed = DeriveSeed(config_.seed, {k, kTrain});
  policy_ = TrainPolicy(env_, spec_, params_, policy_, cem, &buffer_, ids_);
  report.success_rate = EvaluateSuccess();

  report.batch = Rollout(env_, policy_, config_.rollout_samples,
                         DeriveSeed(config_.seed, {k, kRollout}), ids_);
  for (auto& t : HistogramSample(buffer_, spec_, params_, config_.histogram_samples,
                                 config_.histogram_bins,
                                 DeriveSeed(config_.seed, {k, kHistogram}))) {
    report.batch.push_back(std::move(t));
  }
  report.reward_ranking = RankByReward(report.batch, spec_, params_);

  try {
    OracleRanking ranked =
        oracle_->Rank(report.batch, spec_, params_, DeriveSeed(config_.seed, {k, kOracle}));
    report.oracle_ranking = std::move(ranked.ranking);
    report.transcript = std::move(ranked.transcript);
    DiscrepancyPairs(report.reward_ranking, report.oracle_ranking);
  } catch (const Error& e) {
    report.oracle_failed = true;
    report.oracle_error = e.what();
  } catch (const std::invalid_argument& e) {
    report.oracle_failed = true;
    report.oracle_error = e.what();
  }
  if (report.oracle_failed) {
    report.params_after = params_;
    return report;
  }

  report.inconsistency_before = CountDiscrepancy(report.reward_ranking, report.oracle_ranking);
  report.inconsistency_after = report.inconsistency_before;

  if (config_.update_rewards) {
    PreferenceDataset dataset =
        BuildPreferenceDataset(report.reward_ranking, report.oracle_ranking, report.batch,
                               config_.beta, DeriveSeed(config_.seed, {k, kDataset}));
    if (!dataset.empty()) {
      MHConfig mh = config_.mh;
      mh.seed = DeriveSeed(config_.seed, {k, kUpdate});
      CandidateUpdate update = RadiusConstrainedUpdate(params_, dataset, spec_, config_.radii,
                                                       mh, &report.oracle_ranking);
      const std::size_t after = CountDiscrepancy(
          RankByReward(report.batch, spec_, update.params), report.oracle_ranking);
      if (update.changed && after < report.inconsistency_before) {
        params_ = update.params;
        params_.RestoreDomains();
        report.accepted = true;
        report.update_radius = update.radius;
        report.inconsistency_after = after;
      }
    } else if (report.success_rate < config_.adjustment_threshold) {
      ActiveAdjustment(report, k);
    }
  }
  report.params_after = params_;
  return report;
}

void AlignmentRun::ActiveAdjustment(IterationReport& report, std::uint64_t k) {
  report.adjustment_fired = true;
  try {
    OracleReflection reflection =
        oracle_->Reflect(report.batch, spec_, params_, DeriveSeed(config_.seed, {k, kReflect}));
    report.directions = std::move(reflection.directions);
    report.transcript += "\n" + reflection.transcript;
  } catch (const Error& e) {
    report.oracle_failed = true;
    report.oracle_error = e.what();
    return;
  }

  ParamVector restricted = params_;
  bool any = false;
  for (const auto& [name, direction] : report.directions) {
    const auto index = restricted.IndexOf(name);
    if (!index || direction == Direction::kNoChange) continue;
    ParamDomain& d = restricted.domain(*index);
    const double v = restricted.value(*index);
    const double open = kOpenBoundFraction * (d.max - d.min);
    if (direction == Direction::kIncrease && v + open <= d.max) {
      d.active_min = v + open;
      any = true;
    } else if (direction == Direction::kDecrease && v - open >= d.min) {
      d.active_max = v - open;
      any = true;
    }
  }
  if (!any) return;

  PreferenceDataset dataset = FullRankingDataset(report.oracle_ranking, report.batch, config_.beta);
  MHConfig mh = config_.mh;
  mh.seed = DeriveSeed(config_.seed, {k, kAdjust});
  CandidateUpdate update = RadiusConstrainedUpdate(restricted, dataset, spec_, config_.radii,
                                                   mh, &report.oracle_ranking);
  ParamVector candidate = update.params;
  candidate.RestoreDomains();
  const std::size_t after =
      CountDiscrepancy(RankByReward(report.batch, spec_, candidate), report.oracle_ranking);
  if (update.changed && after == 0 && !(candidate == params_)) {
    params_ = candidate;
    report.accepted = true;
    report.update_radius = update.radius;
    report.inconsistency_after = after;
  }
}

ExperimentResult RunExperiment(AlignmentRun& run, const AlignmentConfig& config,
                               const std::function<void(const IterationReport&)>& on_iteration) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.initial_success = run.EvaluateSuccess();
  result.final_success = result.initial_success;
  result.reached_target = result.initial_success >= config.target_success;
  while (!result.reached_target && result.iterations < config.max_iterations) {
    IterationReport report = run.RunIteration();
    ++result.iterations;
    result.final_success = report.success_rate;
    result.reached_target = report.success_rate >= config.target_success;
    if (on_iteration) on_iteration(report);
    result.reports.push_back(std::move(report));
  }
  result.final_params = run.params();
  result.tokens = run.tokens_used();
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace selfalign
