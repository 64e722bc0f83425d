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

#include "selfalign/oracle.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "selfalign/errors.h"
#include "selfalign/seeding.h"

namespace selfalign {

std::string FormatFeatureValue(const FeatureValue& value) {
  if (value.is_absent()) return "None";
  if (value.is_bool()) return value.AsBool() ? "True" : "False";
  return fmt::format("{:.4f}", value.AsReal());
}

std::string DescribeFeatures(int sample_index, const FeatureRecord& features) {
  if (features.empty()) {
    throw std::invalid_argument(
        fmt::format("data sample {} has an empty feature record", sample_index));
  }
  std::string out = fmt::format("data sample {}: ", sample_index);
  bool first = true;
  for (const auto& [name, value] : features.entries()) {
    if (!first) out += ", ";
    first = false;
    out += fmt::format("{} = {}", name, FormatFeatureValue(value));
  }
  out += ".";
  return out;
}

std::vector<ExecutionDescription> DescribeExecution(std::span<const Trajectory> batch) {
  std::vector<ExecutionDescription> out;
  out.reserve(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    if (batch[k].features.empty()) {
      throw std::invalid_argument(fmt::format("trajectory {} has no steps", batch[k].id));
    }
    const int index = static_cast<int>(k);
    out.push_back({index, batch[k].id, DescribeFeatures(index, batch[k].features.back())});
  }
  return out;
}

std::string JoinDescriptions(std::span<const ExecutionDescription> descriptions) {
  std::string out;
  for (const auto& d : descriptions) {
    if (!out.empty()) out += "\n";
    out += "  - " + d.line;
  }
  return out;
}

std::size_t AssignStage(const FeatureRecord& features, std::span<const StageRule> rules) {
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (rules[i].Matches(features)) hits.push_back(i);
  }
  if (hits.size() == 1) return hits.front();
  std::string listing;
  for (const auto& r : rules) listing += "\n  " + r.Describe();
  throw Error(fmt::format("step {} matches {} stage rules (expected exactly one):{}",
                          features.step(), hits.size(), listing));
}

namespace {

struct Placed {
  std::size_t index = 0;
  int stage = 0;
  double score = 0.0;
};

std::vector<Placed> OrderBatch(std::span<const Trajectory> batch,
                               std::span<const StageRule> rules) {
  std::vector<Placed> placed;
  placed.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].features.empty()) {
      throw std::invalid_argument(fmt::format("trajectory {} has no steps", batch[i].id));
    }
    const FeatureRecord& last = batch[i].features.back();
    const StageRule& rule = rules[AssignStage(last, rules)];
    placed.push_back({i, rule.stage, rule.Score(last)});
  }
  std::stable_sort(placed.begin(), placed.end(), [](const Placed& a, const Placed& b) {
    if (a.stage != b.stage) return a.stage > b.stage;
    return a.score > b.score;
  });
  return placed;
}

double Logistic(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

std::string IndexList(std::span<const std::size_t> indices) {
  std::string out = "[";
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(indices[i]);
  }
  return out + "]";
}

}  // namespace

Ranking ScriptedRank(std::span<const Trajectory> batch, std::span<const StageRule> rules,
                     const ScriptedOracleConfig& config) {
  if (!(config.beta >= 0.0)) throw ConfigError("oracle beta must be >= 0");
  std::vector<Placed> placed = OrderBatch(batch, rules);
  if (config.swap == SwapModel::kBoltzmannAdjacent) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i + 1 < placed.size(); ++i) {
      if (placed[i].stage != placed[i + 1].stage) continue;
      const double gap = std::abs(placed[i].score - placed[i + 1].score);
      const double p_swap = 1.0 - Logistic(config.beta * gap);
      if (unit(rng) < p_swap) std::swap(placed[i], placed[i + 1]);
    }
  }
  Ranking out;
  out.provenance = RankingProvenance::kOracle;
  for (const auto& p : placed) out.ids.push_back(batch[p.index].id);
  return out;
}

std::string_view DirectionName(Direction d) {
  switch (d) {
    case Direction::kIncrease:
      return "increase";
    case Direction::kDecrease:
      return "decrease";
    case Direction::kNoChange:
      return "no change";
  }
  return "no change";
}

ReflectionResult ScriptedReflect(std::span<const Trajectory> batch, const EnvSpec& env,
                                 const RewardSpec& spec) {
  if (batch.empty()) throw std::invalid_argument("reflection needs a nonempty batch");
  int furthest = std::numeric_limits<int>::min();
  for (const auto& t : batch) {
    if (t.features.empty()) {
      throw std::invalid_argument(fmt::format("trajectory {} has no steps", t.id));
    }
    furthest = std::max(furthest, env.stage_rules[AssignStage(t.features.back(),
                                                              env.stage_rules)].stage);
  }
  const StageAdvice* advice = nullptr;
  for (const auto& a : env.reflection_advice) {
    if (a.stage <= furthest && (advice == nullptr || a.stage > advice->stage)) advice = &a;
  }
  ReflectionResult out;
  if (advice == nullptr) return out;
  for (const auto& [name, dir] : advice->directions) {
    if (spec.defaults().IndexOf(name)) out[name] = dir;
  }
  return out;
}

ScriptedOracle::ScriptedOracle(EnvSpec env, ScriptedOracleConfig config)
    : env_(std::move(env)), config_(config) {
  if (!(config_.beta >= 0.0)) throw ConfigError("oracle beta must be >= 0");
}

OracleRanking ScriptedOracle::Rank(std::span<const Trajectory> batch, const RewardSpec&,
                                   const ParamVector&, std::uint64_t seed) {
  ScriptedOracleConfig cfg = config_;
  cfg.seed = DeriveSeed(config_.seed, {seed});
  OracleRanking out;
  out.ranking = ScriptedRank(batch, env_.stage_rules, cfg);

  const auto descriptions = DescribeExecution(batch);
  std::string transcript = "Given execution observation for\n" + JoinDescriptions(descriptions);
  transcript += "\n\nStages:";
  for (const auto& rule : env_.stage_rules) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (rule.Matches(batch[i].features.back())) members.push_back(i);
    }
    transcript += fmt::format("\n  - {}: {}", rule.Describe(), IndexList(members));
  }
  std::vector<std::size_t> order;
  for (std::int64_t id : out.ranking.ids) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch[i].id == id) order.push_back(i);
    }
  }
  transcript += "\nThe final result is:\n" + IndexList(order) + "\n";
  out.transcript = std::move(transcript);
  return out;
}

OracleReflection ScriptedOracle::Reflect(std::span<const Trajectory> batch,
                                         const RewardSpec& spec, const ParamVector& params,
                                         std::uint64_t) {
  OracleReflection out;
  out.directions = ScriptedReflect(batch, env_, spec);
  const auto descriptions = DescribeExecution(batch);
  std::string transcript = "Given execution observation for\n" + JoinDescriptions(descriptions);
  transcript += "\n\nResult:\n{";
  std::size_t k = 0;
  for (const auto& [name, dir] : out.directions) {
    if (k > 0) transcript += "\n ";
    const bool last = ++k == out.directions.size();
    transcript += fmt::format("'{}': {}{} # {}", name, params.value(name), last ? "}" : ",",
                              DirectionName(dir));
  }
  if (out.directions.empty()) transcript += "}";
  transcript += "\n";
  out.transcript = std::move(transcript);
  return out;
}

}  // namespace selfalign
