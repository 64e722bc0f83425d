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

#include "selfalign/run_config.h"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "selfalign/envs.h"
#include "selfalign/errors.h"
#include "selfalign/reward_io.h"

namespace selfalign {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(Name("") + " must be an object");
  }

  template <typename T>
  void Get(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = doc_.find(key);
    if (it == doc_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(fmt::format("{}: wrong type ({})", Name(key), it->type_name()));
    }
  }

  const json* Child(const std::string& key) {
    seen_.insert(key);
    auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  std::string Name(const std::string& key) const {
    if (path_.empty()) return key.empty() ? "config" : key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  void Finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown config field: " + Name(key));
    }
  }

 private:
  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string BackendName(OracleBackend b) { return b == OracleBackend::kLlm ? "llm" : "scripted"; }
std::string SwapName(SwapModel s) { return s == SwapModel::kNone ? "none" : "boltzmann"; }

ordered_json CemToJson(const CEMConfig& c) {
  return {{"population", c.population}, {"elite_fraction", c.elite_fraction},
          {"generations", c.generations}, {"episodes", c.episodes},
          {"init_std", c.init_std},       {"min_std", c.min_std},
          {"explore", c.explore}};
}

ordered_json MhToJson(const MHConfig& m) {
  return {{"burn_in", m.burn_in}, {"n_samples", m.n_samples},
          {"proposal_sigma", m.proposal_sigma}};
}

}  // namespace

void RunConfig::Validate() const {
  const auto envs = EnvNames();
  if (std::find(envs.begin(), envs.end(), env) == envs.end()) {
    throw ConfigError(fmt::format("env: unknown environment '{}'", env));
  }
  if (seeds.empty()) throw ConfigError("seeds: list is empty");
  if (condition.empty()) throw ConfigError("condition: label is empty");
  if (!reward_spec.empty()) {
    const auto names = BuiltinSpecNames();
    if (std::find(names.begin(), names.end(), reward_spec) == names.end() &&
        !std::filesystem::exists(reward_spec)) {
      throw ConfigError(fmt::format("reward_spec: '{}' is neither a built-in spec nor a file",
                                    reward_spec));
    }
  }
  if (oracle.backend == OracleBackend::kLlm) {
    if (oracle.endpoint.empty()) throw ConfigError("oracle.endpoint: empty");
    if (oracle.api_key_env.empty()) throw ConfigError("oracle.api_key_env: empty");
  }
  if (!(oracle.beta >= 0.0) || !std::isfinite(oracle.beta)) {
    throw ConfigError("oracle.beta: must be finite and non-negative");
  }
  try {
    alignment.Validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("alignment: ") + e.what());
  }
}

ordered_json RunConfigToJson(const RunConfig& c) {
  ordered_json doc;
  doc["condition"] = c.condition;
  doc["env"] = c.env;
  doc["reward_spec"] = c.reward_spec;
  doc["initial_params"] = ordered_json::object();
  for (const auto& [k, v] : c.initial_params) doc["initial_params"][k] = v;
  doc["oracle"] = {{"backend", BackendName(c.oracle.backend)},
                   {"beta", c.oracle.beta},
                   {"swap", SwapName(c.oracle.swap)},
                   {"endpoint", c.oracle.endpoint},
                   {"model", c.oracle.model},
                   {"temperature", c.oracle.temperature},
                   {"api_key_env", c.oracle.api_key_env},
                   {"timeout_seconds", c.oracle.timeout_seconds}};
  const AlignmentConfig& a = c.alignment;
  doc["alignment"] = {{"max_iterations", a.max_iterations},
                      {"adjustment_threshold", a.adjustment_threshold},
                      {"target_success", a.target_success},
                      {"rollout_samples", a.rollout_samples},
                      {"histogram_samples", a.histogram_samples},
                      {"histogram_bins", a.histogram_bins},
                      {"beta", a.beta},
                      {"radii", a.radii},
                      {"eval_episodes", a.eval_episodes},
                      {"buffer_capacity", a.buffer_capacity},
                      {"update_rewards", a.update_rewards},
                      {"cem", CemToJson(a.cem)},
                      {"mh", MhToJson(a.mh)}};
  doc["out"] = c.out.string();
  doc["seeds"] = c.seeds;
  return doc;
}

RunConfig RunConfigFromJson(const json& doc) {
  RunConfig c;
  Section root(doc, "");
  root.Get("condition", c.condition);
  root.Get("env", c.env);
  if (!doc.contains("env")) throw ConfigError("env: required field is missing");
  root.Get("reward_spec", c.reward_spec);
  root.Get("initial_params", c.initial_params);
  std::string out = c.out.string();
  root.Get("out", out);
  c.out = out;
  root.Get("seeds", c.seeds);

  if (const json* o = root.Child("oracle")) {
    Section s(*o, "oracle");
    std::string backend = BackendName(c.oracle.backend);
    std::string swap = SwapName(c.oracle.swap);
    s.Get("backend", backend);
    s.Get("swap", swap);
    s.Get("beta", c.oracle.beta);
    s.Get("endpoint", c.oracle.endpoint);
    s.Get("model", c.oracle.model);
    s.Get("temperature", c.oracle.temperature);
    s.Get("api_key_env", c.oracle.api_key_env);
    s.Get("timeout_seconds", c.oracle.timeout_seconds);
    s.Finish();
    if (backend == "scripted") {
      c.oracle.backend = OracleBackend::kScripted;
    } else if (backend == "llm") {
      c.oracle.backend = OracleBackend::kLlm;
    } else {
      throw ConfigError(fmt::format("oracle.backend: unknown backend '{}'", backend));
    }
    if (swap == "boltzmann") {
      c.oracle.swap = SwapModel::kBoltzmannAdjacent;
    } else if (swap == "none") {
      c.oracle.swap = SwapModel::kNone;
    } else {
      throw ConfigError(fmt::format("oracle.swap: unknown swap model '{}'", swap));
    }
  }

  if (const json* a = root.Child("alignment")) {
    AlignmentConfig& al = c.alignment;
    Section s(*a, "alignment");
    s.Get("max_iterations", al.max_iterations);
    s.Get("adjustment_threshold", al.adjustment_threshold);
    s.Get("target_success", al.target_success);
    s.Get("rollout_samples", al.rollout_samples);
    s.Get("histogram_samples", al.histogram_samples);
    s.Get("histogram_bins", al.histogram_bins);
    s.Get("beta", al.beta);
    s.Get("radii", al.radii);
    s.Get("eval_episodes", al.eval_episodes);
    s.Get("buffer_capacity", al.buffer_capacity);
    s.Get("update_rewards", al.update_rewards);
    if (const json* cem = s.Child("cem")) {
      Section cs(*cem, "alignment.cem");
      cs.Get("population", al.cem.population);
      cs.Get("elite_fraction", al.cem.elite_fraction);
      cs.Get("generations", al.cem.generations);
      cs.Get("episodes", al.cem.episodes);
      cs.Get("init_std", al.cem.init_std);
      cs.Get("min_std", al.cem.min_std);
      cs.Get("explore", al.cem.explore);
      cs.Finish();
    }
    if (const json* mh = s.Child("mh")) {
      Section ms(*mh, "alignment.mh");
      ms.Get("burn_in", al.mh.burn_in);
      ms.Get("n_samples", al.mh.n_samples);
      ms.Get("proposal_sigma", al.mh.proposal_sigma);
      ms.Finish();
    }
    s.Finish();
  }
  root.Finish();
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  RunConfig c = RunConfigFromJson(doc);
  const auto names = BuiltinSpecNames();
  if (!c.reward_spec.empty() &&
      std::find(names.begin(), names.end(), c.reward_spec) == names.end()) {
    std::filesystem::path spec_path(c.reward_spec);
    if (spec_path.is_relative()) c.reward_spec = (path.parent_path() / spec_path).string();
  }
  return c;
}

void SaveRunConfig(const RunConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << RunConfigToJson(config).dump(2) << '\n';
}

std::vector<std::uint64_t> ParseSeedList(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) -> std::uint64_t {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || s.front() == '-') {
      throw ConfigError(fmt::format("seed: '{}' is not a non-negative integer", s));
    }
    return v;
  };
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-', 1);
    if (dash != std::string::npos) {
      const std::uint64_t lo = number(item.substr(0, dash));
      const std::uint64_t hi = number(item.substr(dash + 1));
      if (hi < lo) throw ConfigError(fmt::format("seed: empty range '{}'", item));
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(number(item));
    }
  }
  if (seeds.empty()) throw ConfigError("seed: list is empty");
  return seeds;
}

RewardSpec ResolveSpec(const RunConfig& config) {
  std::string name = config.reward_spec;
  if (name.empty()) {
    name = config.env == "drawer-pull-1d" ? "open-drawer" : config.env;
  }
  RewardSpec spec = ResolveRewardSpec(name);
  spec.CheckFeatureSchema(MakeEnv(config.env)->spec().FeatureNames());
  return spec;
}

ParamVector InitialParams(const RunConfig& config, const RewardSpec& spec) {
  ParamVector params = spec.defaults();
  for (const auto& [name, value] : config.initial_params) {
    const auto idx = params.IndexOf(name);
    if (!idx) throw ConfigError(fmt::format("initial_params: unknown parameter '{}'", name));
    if (!params.domain(*idx).ContainsFull(value)) {
      throw ConfigError(fmt::format("initial_params: {} = {} lies outside [{}, {}]", name, value,
                                    params.domain(*idx).min, params.domain(*idx).max));
    }
    params.Set(*idx, value);
  }
  return params;
}

}  // namespace selfalign
