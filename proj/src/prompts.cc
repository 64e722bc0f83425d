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

#include "selfalign/prompts.h"

#include <regex>

#include <fmt/format.h>

#include "selfalign/errors.h"

namespace selfalign {
namespace internal {
std::string_view PromptAsset(std::string_view name);
}  // namespace internal

std::string_view PromptTemplate(std::string_view name) {
  return internal::PromptAsset(name);
}

std::string RenderTemplate(std::string_view tmpl,
                           const std::map<std::string, std::string>& values) {
  static const std::regex kPlaceholder(R"(\{([a-z_]+)\})");
  std::string out;
  std::string missing;
  const std::string text(tmpl);
  auto begin = std::sregex_iterator(text.begin(), text.end(), kPlaceholder);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(text, last, static_cast<std::size_t>(m.position()) - last);
    auto found = values.find(m[1].str());
    if (found == values.end()) {
      if (!missing.empty()) missing += ", ";
      missing += m[1].str();
      out += m.str();
    } else {
      out += found->second;
    }
    last = static_cast<std::size_t>(m.position() + m.length());
  }
  out.append(text, last, std::string::npos);
  if (!missing.empty()) throw ConfigError("unresolved prompt placeholder(s): " + missing);
  return out;
}

namespace {

std::string Number(double v) { return fmt::format("{}", v); }

std::string TermExpression(const RewardTerm& t) {
  const std::string& w = t.weight_param;
  std::string gate = t.negate_gate ? "not " + t.feature : t.feature;
  if (!t.threshold_feature.empty() && t.threshold) {
    gate += fmt::format(" and {} > {}", t.threshold_feature, Number(*t.threshold));
  }
  switch (t.form) {
    case ExpressionForm::kNegatedFeature:
      return fmt::format("-{} * {}", w, t.feature);
    case ExpressionForm::kFeature:
      return fmt::format("{} * {}", w, t.feature);
    case ExpressionForm::kGatedConstant:
      return fmt::format("{} * {} if {} else 0.0", w, Number(t.constant), gate);
    case ExpressionForm::kGatedNegatedConstant:
      return fmt::format("-{} * {} if {} else 0.0", w, Number(t.constant), gate);
    case ExpressionForm::kThresholdedNegatedFeature:
      return fmt::format("-{} * {} if {} > {} else 0.0", w, t.feature, t.feature,
                         Number(t.threshold.value_or(0.0)));
  }
  return "0.0";
}

}  // namespace

std::string RenderRewardFunction(const RewardSpec& spec, const ParamVector& params) {
  spec.CheckConforms(params);
  std::string args = "obs";
  for (std::size_t i = 0; i < params.size(); ++i) {
    args += fmt::format(", {}={}", params.names()[i], Number(params.value(i)));
  }
  std::string body;
  for (const auto& f : spec.ReferencedFeatures()) {
    body += fmt::format("    {} = obs['{}']\n", f, f);
  }
  body += "\n";
  std::string total;
  for (const auto& t : spec.terms()) {
    body += fmt::format("    {} = {}\n", t.name, TermExpression(t));
    total += total.empty() ? t.name : " + " + t.name;
  }
  if (total.empty()) total = "0.0";
  return fmt::format("def get_reward({}):\n{}\n    reward = {}\n    return reward", args, body,
                     total);
}

std::string RenderObservationList(const EnvSpec& env) {
  std::string out;
  for (std::size_t i = 0; i < env.features.size(); ++i) {
    const auto& f = env.features[i];
    if (i > 0) out += "\n";
    out += fmt::format("{}. obs['{}']: {}", i + 1, f.name,
                       f.kind == FeatureKind::kBool ? "a boolean value" : "a real scalar");
  }
  return out;
}

}  // namespace selfalign
