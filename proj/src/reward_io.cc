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

#include "selfalign/reward_io.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "selfalign/errors.h"

namespace selfalign {

using nlohmann::json;

json RewardSpecToJson(const RewardSpec& spec) {
  json doc;
  doc["name"] = spec.name();
  json params = json::array();
  const ParamVector& d = spec.defaults();
  for (std::size_t i = 0; i < d.size(); ++i) {
    params.push_back({{"name", d.names()[i]},
                      {"default", d.value(i)},
                      {"min", d.domain(i).min},
                      {"max", d.domain(i).max}});
  }
  doc["parameters"] = std::move(params);
  json terms = json::array();
  for (const RewardTerm& t : spec.terms()) {
    json jt = {{"name", t.name},
               {"weight_param", t.weight_param},
               {"form", std::string(ExpressionFormName(t.form))},
               {"feature", t.feature}};
    const bool gated = t.form == ExpressionForm::kGatedConstant ||
                       t.form == ExpressionForm::kGatedNegatedConstant;
    if (gated) {
      jt["negate"] = t.negate_gate;
      jt["constant"] = t.constant;
      if (!t.threshold_feature.empty()) jt["threshold_feature"] = t.threshold_feature;
    }
    if (t.threshold) jt["threshold"] = *t.threshold;
    terms.push_back(std::move(jt));
  }
  doc["terms"] = std::move(terms);
  return doc;
}

namespace {

template <typename T>
bool Fetch(const json& obj, const char* key, T& out, std::vector<std::string>& issues,
           const std::string& where, bool required = true) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) issues.push_back(fmt::format("{}: missing '{}'", where, key));
    return false;
  }
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    issues.push_back(fmt::format("{}: '{}' has the wrong type", where, key));
    return false;
  }
  return true;
}

}  // namespace

RewardSpec RewardSpecFromJson(const json& doc) {
  std::vector<std::string> issues;
  if (!doc.is_object()) throw ValidationError({"reward spec is not a JSON object"});
  std::string name = doc.value("name", std::string("unnamed"));

  ParamVector params;
  auto pit = doc.find("parameters");
  if (pit == doc.end() || !pit->is_array()) {
    issues.push_back("missing 'parameters' array");
  } else {
    for (std::size_t i = 0; i < pit->size(); ++i) {
      const json& p = (*pit)[i];
      std::string where = fmt::format("parameters[{}]", i);
      if (!p.is_object()) {
        issues.push_back(where + ": not an object");
        continue;
      }
      std::string pname;
      double def = 0, lo = 0, hi = 0;
      bool ok = Fetch(p, "name", pname, issues, where);
      if (ok) where = fmt::format("parameter '{}'", pname);
      ok &= Fetch(p, "default", def, issues, where);
      ok &= Fetch(p, "min", lo, issues, where);
      ok &= Fetch(p, "max", hi, issues, where);
      if (!ok) continue;
      if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        issues.push_back(fmt::format("{}: domain [{}, {}] is not a finite interval", where, lo, hi));
        continue;
      }
      try {
        params.Add(pname, def, ParamDomain::Full(lo, hi));
      } catch (const ConfigError& e) {
        issues.push_back(fmt::format("{}: {}", where, e.what()));
      }
    }
  }

  std::vector<RewardTerm> terms;
  auto tit = doc.find("terms");
  if (tit == doc.end() || !tit->is_array()) {
    issues.push_back("missing 'terms' array");
  } else {
    for (std::size_t i = 0; i < tit->size(); ++i) {
      const json& j = (*tit)[i];
      std::string where = fmt::format("terms[{}]", i);
      if (!j.is_object()) {
        issues.push_back(where + ": not an object");
        continue;
      }
      RewardTerm t;
      bool ok = Fetch(j, "name", t.name, issues, where);
      if (ok) where = fmt::format("term '{}'", t.name);
      ok &= Fetch(j, "weight_param", t.weight_param, issues, where);
      ok &= Fetch(j, "feature", t.feature, issues, where);
      std::string form;
      if (Fetch(j, "form", form, issues, where)) {
        if (auto f = ParseExpressionForm(form)) {
          t.form = *f;
        } else {
          issues.push_back(fmt::format("{}: unknown expression form '{}'", where, form));
          ok = false;
        }
      } else {
        ok = false;
      }
      Fetch(j, "negate", t.negate_gate, issues, where, false);
      Fetch(j, "constant", t.constant, issues, where, false);
      Fetch(j, "threshold_feature", t.threshold_feature, issues, where, false);
      double threshold = 0;
      if (Fetch(j, "threshold", threshold, issues, where, false)) t.threshold = threshold;
      if (ok) terms.push_back(std::move(t));
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return RewardSpec(std::move(name), std::move(terms), std::move(params));
}

RewardSpec LoadRewardSpec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read reward spec: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return RewardSpecFromJson(doc);
}

void SaveRewardSpec(const RewardSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << RewardSpecToJson(spec).dump(2) << "\n";
}

RewardSpec ResolveRewardSpec(const std::string& name_or_path) {
  for (const auto& n : BuiltinSpecNames()) {
    if (n == name_or_path) return BuiltinSpec(n);
  }
  if (!std::filesystem::exists(name_or_path)) {
    throw ConfigError("unknown reward spec (not a built-in, no such file): " + name_or_path);
  }
  return LoadRewardSpec(name_or_path);
}

}  // namespace selfalign
