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

#include "selfalign/reward.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "selfalign/errors.h"

namespace selfalign {

ValidationError::ValidationError(std::vector<std::string> issues)
    : ConfigError([&] {
        std::string msg = "validation failed:";
        for (const auto& issue : issues) msg += "\n  - " + issue;
        return msg;
      }()),
      issues_(std::move(issues)) {}

double FeatureValue::AsReal() const {
  if (const double* d = std::get_if<double>(&value_)) return *d;
  if (const bool* b = std::get_if<bool>(&value_)) return *b ? 1.0 : 0.0;
  throw std::logic_error("AsReal() on an absent feature value");
}

bool FeatureValue::AsBool() const {
  if (const bool* b = std::get_if<bool>(&value_)) return *b;
  if (const double* d = std::get_if<double>(&value_)) return *d != 0.0;
  throw std::logic_error("AsBool() on an absent feature value");
}

void FeatureRecord::Set(std::string name, FeatureValue value) {
  if (name.empty()) throw std::invalid_argument("feature name is empty");
  for (auto& [n, v] : entries_) {
    if (n == name) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(std::move(name), value);
}

const FeatureValue* FeatureRecord::Find(std::string_view name) const {
  for (const auto& [n, v] : entries_) {
    if (n == name) return &v;
  }
  return nullptr;
}

void Trajectory::Validate() const {
  if (features.empty()) {
    throw std::invalid_argument(
        fmt::format("trajectory {} has no steps", id));
  }
  if (states.size() != features.size() || actions.size() != features.size()) {
    throw std::invalid_argument(fmt::format(
        "trajectory {}: {} states, {} actions, {} feature records", id,
        states.size(), actions.size(), features.size()));
  }
}

ParamDomain ParamDomain::Full(double min, double max) {
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
    throw ConfigError(fmt::format("degenerate parameter domain [{}, {}]", min, max));
  }
  return ParamDomain{min, max, min, max};
}

ParamVector::ParamVector()
    : names_(std::make_shared<const std::vector<std::string>>()) {}

void ParamVector::Add(std::string name, double value, ParamDomain domain) {
  if (IndexOf(name)) throw ConfigError("duplicate parameter: " + name);
  if (!(domain.min < domain.max) || domain.active_min < domain.min ||
      domain.active_max > domain.max || domain.active_min > domain.active_max) {
    throw ConfigError(fmt::format("invalid domain for parameter {}", name));
  }
  if (!std::isfinite(value) || !domain.ContainsActive(value)) {
    throw ConfigError(fmt::format("parameter {} = {} outside [{}, {}]", name,
                                  value, domain.active_min, domain.active_max));
  }
  auto names = std::make_shared<std::vector<std::string>>(*names_);
  names->push_back(std::move(name));
  names_ = std::move(names);
  values_.push_back(value);
  domains_.push_back(domain);
}

std::optional<std::size_t> ParamVector::IndexOf(std::string_view name) const {
  const auto& n = *names_;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] == name) return i;
  }
  return std::nullopt;
}

double ParamVector::value(std::string_view name) const {
  auto i = IndexOf(name);
  if (!i) throw std::out_of_range("unknown parameter: " + std::string(name));
  return values_[*i];
}

void ParamVector::Set(std::string_view name, double v) {
  auto i = IndexOf(name);
  if (!i) throw std::out_of_range("unknown parameter: " + std::string(name));
  values_[*i] = v;
}

void ParamVector::SetValues(std::span<const double> values) {
  if (values.size() != values_.size()) {
    throw std::invalid_argument("parameter count mismatch");
  }
  std::copy(values.begin(), values.end(), values_.begin());
}

bool ParamVector::InActiveDomain() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!domains_[i].ContainsActive(values_[i])) return false;
  }
  return true;
}

bool ParamVector::InFullDomain() const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!domains_[i].ContainsFull(values_[i])) return false;
  }
  return true;
}

void ParamVector::RestoreDomains() {
  for (auto& d : domains_) d.Restore();
}

bool ParamVector::SameLayout(const ParamVector& other) const {
  return names_ == other.names_ || *names_ == *other.names_;
}

double ParamVector::DistanceTo(const ParamVector& other) const {
  if (!SameLayout(other)) throw std::invalid_argument("parameter layout mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double d = values_[i] - other.values_[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

bool ParamVector::operator==(const ParamVector& other) const {
  return SameLayout(other) && values_ == other.values_ &&
         domains_ == other.domains_;
}

std::vector<double> Normalize(const ParamVector& params) {
  std::vector<double> unit(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const ParamDomain& d = params.domain(i);
    const double v = params.value(i);
    if (!d.ContainsFull(v)) {
      throw RewardError(fmt::format("parameter {} = {} outside [{}, {}]",
                                    params.names()[i], v, d.min, d.max));
    }
    unit[i] = (v - d.min) / (d.max - d.min);
  }
  return unit;
}

ParamVector Denormalize(const ParamVector& layout, std::span<const double> unit) {
  if (unit.size() != layout.size()) {
    throw std::invalid_argument("unit vector size mismatch");
  }
  ParamVector out = layout;
  for (std::size_t i = 0; i < unit.size(); ++i) {
    const ParamDomain& d = layout.domain(i);
    out.Set(i, d.min + unit[i] * (d.max - d.min));
  }
  return out;
}

namespace {

struct FormName {
  ExpressionForm form;
  std::string_view name;
};

constexpr FormName kFormNames[] = {
    {ExpressionForm::kNegatedFeature, "negated_feature"},
    {ExpressionForm::kFeature, "feature"},
    {ExpressionForm::kGatedConstant, "gated_constant"},
    {ExpressionForm::kThresholdedNegatedFeature, "thresholded_negated_feature"},
    {ExpressionForm::kGatedNegatedConstant, "gated_negated_constant"},
};

bool IsGated(ExpressionForm form) {
  return form == ExpressionForm::kGatedConstant ||
         form == ExpressionForm::kGatedNegatedConstant;
}

double RequireReal(const FeatureRecord& features, const std::string& feature,
                   const std::string& term) {
  const FeatureValue* v = features.Find(feature);
  if (v == nullptr) {
    throw RewardError(fmt::format("term {}: feature {} is missing", term, feature));
  }
  if (v->is_absent()) {
    throw RewardError(fmt::format("term {}: feature {} is absent", term, feature));
  }
  return v->AsReal();
}

}  // namespace

std::string_view ExpressionFormName(ExpressionForm form) {
  for (const auto& f : kFormNames) {
    if (f.form == form) return f.name;
  }
  return "unknown";
}

std::optional<ExpressionForm> ParseExpressionForm(std::string_view name) {
  for (const auto& f : kFormNames) {
    if (f.name == name) return f.form;
  }
  return std::nullopt;
}

double RewardTerm::Base(const FeatureRecord& features) const {
  switch (form) {
    case ExpressionForm::kNegatedFeature:
      return -RequireReal(features, feature, name);
    case ExpressionForm::kFeature:
      return RequireReal(features, feature, name);
    case ExpressionForm::kThresholdedNegatedFeature: {
      const double f = RequireReal(features, feature, name);
      return f > *threshold ? -f : 0.0;
    }
    case ExpressionForm::kGatedConstant:
    case ExpressionForm::kGatedNegatedConstant: {
      bool gate = RequireReal(features, feature, name) != 0.0;
      if (negate_gate) gate = !gate;
      if (gate && !threshold_feature.empty()) {
        gate = RequireReal(features, threshold_feature, name) > *threshold;
      }
      if (!gate) return 0.0;
      return form == ExpressionForm::kGatedConstant ? constant : -constant;
    }
  }
  return 0.0;
}

std::vector<std::string> RewardTerm::Features() const {
  std::vector<std::string> out{feature};
  if (!threshold_feature.empty()) out.push_back(threshold_feature);
  return out;
}

bool HasTermSuffix(std::string_view name) {
  return name.ends_with("_reward") || name.ends_with("_penalty");
}

RewardSpec::RewardSpec(std::string name, std::vector<RewardTerm> terms,
                       ParamVector defaults)
    : name_(std::move(name)),
      terms_(std::move(terms)),
      defaults_(std::move(defaults)) {
  std::vector<std::string> issues;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const RewardTerm& t = terms_[i];
    if (!HasTermSuffix(t.name)) {
      issues.push_back(fmt::format(
          "term '{}': name must end with \"_reward\" or \"_penalty\"", t.name));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (terms_[j].name == t.name) {
        issues.push_back(fmt::format("term '{}': duplicate name", t.name));
      }
    }
    if (t.feature.empty()) {
      issues.push_back(fmt::format("term '{}': no feature", t.name));
    }
    if (t.form == ExpressionForm::kThresholdedNegatedFeature && !t.threshold) {
      issues.push_back(fmt::format("term '{}': thresholded form needs a threshold", t.name));
    }
    if (IsGated(t.form) && !t.threshold_feature.empty() && !t.threshold) {
      issues.push_back(fmt::format("term '{}': threshold_feature without threshold", t.name));
    }
    if (!IsGated(t.form) && (t.negate_gate || !t.threshold_feature.empty())) {
      issues.push_back(fmt::format("term '{}': gate options on an ungated form", t.name));
    }
    if (t.threshold && !std::isfinite(*t.threshold)) {
      issues.push_back(fmt::format("term '{}': threshold is not finite", t.name));
    }
    if (auto idx = defaults_.IndexOf(t.weight_param)) {
      weight_index_.push_back(*idx);
    } else {
      issues.push_back(fmt::format("term '{}': unknown weight parameter '{}'",
                                   t.name, t.weight_param));
      weight_index_.push_back(0);
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

std::vector<std::string> RewardSpec::ReferencedFeatures() const {
  std::vector<std::string> out;
  for (const auto& t : terms_) {
    for (auto& f : t.Features()) out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void RewardSpec::CheckFeatureSchema(std::span<const std::string> schema) const {
  std::vector<std::string> issues;
  for (const auto& t : terms_) {
    for (const auto& f : t.Features()) {
      if (std::find(schema.begin(), schema.end(), f) == schema.end()) {
        issues.push_back(fmt::format("term '{}': unknown feature '{}'", t.name, f));
      }
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

void RewardSpec::CheckConforms(const ParamVector& params) const {
  if (!defaults_.SameLayout(params)) {
    throw RewardError(fmt::format(
        "parameters do not match reward spec '{}' layout", name_));
  }
}

bool RewardSpec::operator==(const RewardSpec& other) const {
  return name_ == other.name_ && terms_ == other.terms_ &&
         defaults_ == other.defaults_;
}

double EvaluateReward(const RewardSpec& spec, const ParamVector& params,
                      const FeatureRecord& features) {
  spec.CheckConforms(params);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params.domain(i).ContainsActive(params.value(i))) {
      const ParamDomain& d = params.domain(i);
      throw RewardError(fmt::format("parameter {} = {} outside active domain [{}, {}]",
                                    params.names()[i], params.value(i),
                                    d.active_min, d.active_max));
    }
  }
  const auto& terms = spec.terms();
  const auto& widx = spec.weight_index();
  const std::span<const double> w = params.values();
  double total = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    total += w[widx[k]] * terms[k].Base(features);
  }
  return total;
}

double EvaluateReturn(const RewardSpec& spec, const ParamVector& params,
                      std::span<const FeatureRecord> features) {
  double total = 0.0;
  for (std::size_t t = 0; t < features.size(); ++t) {
    try {
      total += EvaluateReward(spec, params, features[t]);
    } catch (const RewardError& e) {
      throw RewardError(fmt::format("step {}: {}", t, e.what()));
    }
  }
  return total;
}

double EvaluateReturn(const RewardSpec& spec, const ParamVector& params,
                      const Trajectory& traj) {
  return EvaluateReturn(spec, params, std::span<const FeatureRecord>(traj.features));
}

std::vector<double> ReturnCoefficients(const RewardSpec& spec,
                                       std::span<const FeatureRecord> features) {
  std::vector<double> coef(spec.defaults().size(), 0.0);
  const auto& terms = spec.terms();
  const auto& widx = spec.weight_index();
  for (std::size_t t = 0; t < features.size(); ++t) {
    for (std::size_t k = 0; k < terms.size(); ++k) {
      coef[widx[k]] += terms[k].Base(features[t]);
    }
  }
  return coef;
}

}  // namespace selfalign
