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

#include "selfalign/trajectory_log.h"

#include <fmt/format.h>

#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "selfalign/errors.h"

namespace selfalign {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json FeaturesToJson(const FeatureRecord& features) {
  ordered_json out = ordered_json::object();
  for (const auto& [name, value] : features.entries()) {
    if (value.is_absent()) {
      out[name] = nullptr;
    } else if (value.is_bool()) {
      out[name] = value.AsBool();
    } else {
      out[name] = value.AsReal();
    }
  }
  return out;
}

FeatureRecord FeaturesFromJson(const ordered_json& doc, int step) {
  if (!doc.is_object()) throw ConfigError("features must be a JSON object");
  FeatureRecord record(step);
  for (const auto& [name, value] : doc.items()) {
    if (value.is_null()) {
      record.Set(name, FeatureValue::Absent());
    } else if (value.is_boolean()) {
      record.Set(name, FeatureValue::Bool(value.get<bool>()));
    } else if (value.is_number()) {
      record.Set(name, FeatureValue::Real(value.get<double>()));
    } else {
      throw ConfigError(fmt::format("feature '{}' has an unsupported type", name));
    }
  }
  return record;
}

ordered_json StepRecord(const Trajectory& traj, std::size_t step) {
  ordered_json line;
  line["traj"] = traj.id;
  line["step"] = traj.features.at(step).step();
  line["state"] = step < traj.states.size() ? traj.states[step] : std::vector<double>{};
  line["action"] = step < traj.actions.size() ? traj.actions[step] : std::vector<double>{};
  line["features"] = FeaturesToJson(traj.features[step]);
  return line;
}

void WriteTrajectoryLog(std::ostream& out, const Trajectory& traj) {
  for (std::size_t t = 0; t < traj.features.size(); ++t) {
    out << StepRecord(traj, t).dump() << '\n';
  }
}

std::vector<Trajectory> ReadTrajectoryLog(std::istream& in) {
  std::vector<Trajectory> out;
  std::map<std::int64_t, std::size_t> index;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const ordered_json doc = ordered_json::parse(line);
      if (doc.contains("kind")) continue;
      const auto id = doc.at("traj").get<std::int64_t>();
      auto [it, inserted] = index.emplace(id, out.size());
      if (inserted) {
        out.emplace_back();
        out.back().id = id;
      }
      Trajectory& traj = out[it->second];
      traj.states.push_back(doc.at("state").get<std::vector<double>>());
      traj.actions.push_back(doc.at("action").get<std::vector<double>>());
      traj.features.push_back(FeaturesFromJson(doc.at("features"), doc.at("step").get<int>()));
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("trajectory log line {}: {}", line_no, e.what()));
    }
  }
  return out;
}

}  // namespace selfalign
