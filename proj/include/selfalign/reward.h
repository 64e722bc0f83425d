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

#ifndef SELFALIGN_REWARD_H_
#define SELFALIGN_REWARD_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace selfalign {

// A single reward feature value: a real scalar, a boolean, or absent.
// Absent is distinct from zero and renders as "None" in execution
// descriptions.
class FeatureValue {
 public:
  FeatureValue() = default;
  static FeatureValue Absent() { return FeatureValue(); }
  static FeatureValue Real(double v) { return FeatureValue(Storage(v)); }
  static FeatureValue Bool(bool v) { return FeatureValue(Storage(v)); }

  bool is_absent() const {
    return std::holds_alternative<std::monostate>(value_);
  }
  bool is_bool() const { return std::holds_alternative<bool>(value_); }
  bool is_real() const { return std::holds_alternative<double>(value_); }

  // Booleans coerce to 1.0/0.0. Calling on an absent value is a logic error
  // and throws std::logic_error.
  double AsReal() const;
  // Reals are true when nonzero.
  bool AsBool() const;

  bool operator==(const FeatureValue& other) const = default;

 private:
  using Storage = std::variant<std::monostate, double, bool>;
  explicit FeatureValue(Storage v) : value_(v) {}
  Storage value_;
};

// Named feature values observed at one step. Insertion order is preserved
// and is the order used when rendering descriptions.
class FeatureRecord {
 public:
  using Entry = std::pair<std::string, FeatureValue>;

  FeatureRecord() = default;
  explicit FeatureRecord(int step) : step_(step) {}

  // Inserts or overwrites. Throws std::invalid_argument on an empty name.
  void Set(std::string name, FeatureValue value);
  // nullptr when the feature is not recorded at all.
  const FeatureValue* Find(std::string_view name) const;

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  int step() const { return step_; }
  void set_step(int step) { step_ = step; }

  bool operator==(const FeatureRecord& other) const = default;

 private:
  int step_ = 0;
  std::vector<Entry> entries_;
};

struct Trajectory {
  std::int64_t id = 0;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> actions;
  std::vector<FeatureRecord> features;
  bool success = false;

  int horizon() const { return static_cast<int>(features.size()); }
  // Throws std::invalid_argument when the per-step sequences disagree in
  // length or the trajectory is empty.
  void Validate() const;
};

struct ParamDomain {
  double min = 0.0;
  double max = 1.0;
  double active_min = 0.0;
  double active_max = 1.0;

  // Full (unrestricted) domain. Throws ConfigError unless min < max and both
  // are finite.
  static ParamDomain Full(double min, double max);

  bool ContainsActive(double v) const {
    return v >= active_min && v <= active_max;
  }
  bool ContainsFull(double v) const { return v >= min && v <= max; }
  bool restricted() const { return active_min != min || active_max != max; }
  void Restore() {
    active_min = min;
    active_max = max;
  }
  bool operator==(const ParamDomain& other) const = default;
};

// Ordered named parameter values with one domain each. Copies share the name
// table, so conformance checks between copies are a pointer comparison.
class ParamVector {
 public:
  ParamVector();

  // Appends a parameter. Throws ConfigError on a duplicate name or when the
  // value lies outside the domain.
  void Add(std::string name, double value, ParamDomain domain);

  std::size_t size() const { return values_.size(); }
  const std::vector<std::string>& names() const { return *names_; }
  std::span<const double> values() const { return values_; }
  const std::vector<ParamDomain>& domains() const { return domains_; }
  ParamDomain& domain(std::size_t i) { return domains_.at(i); }
  const ParamDomain& domain(std::size_t i) const { return domains_.at(i); }

  std::optional<std::size_t> IndexOf(std::string_view name) const;
  // Throws std::out_of_range for unknown names.
  double value(std::string_view name) const;
  double value(std::size_t i) const { return values_.at(i); }
  // No domain check; callers validate with InActiveDomain().
  void Set(std::string_view name, double v);
  void Set(std::size_t i, double v) { values_.at(i) = v; }
  void SetValues(std::span<const double> values);

  bool InActiveDomain() const;
  bool InFullDomain() const;
  void RestoreDomains();
  bool SameLayout(const ParamVector& other) const;
  // Euclidean distance in raw parameter units.
  double DistanceTo(const ParamVector& other) const;

  bool operator==(const ParamVector& other) const;

 private:
  std::shared_ptr<const std::vector<std::string>> names_;
  std::vector<double> values_;
  std::vector<ParamDomain> domains_;
};

// (theta - min) / (max - min) component-wise over the full domain.
// Throws RewardError when a value lies outside its full domain.
std::vector<double> Normalize(const ParamVector& params);
// Exact inverse of Normalize; domains are copied from `layout`.
ParamVector Denormalize(const ParamVector& layout, std::span<const double> unit);

enum class ExpressionForm {
  kNegatedFeature,             // -f
  kFeature,                    // f
  kGatedConstant,              // c if gate else 0
  kThresholdedNegatedFeature,  // -f if f > threshold else 0
  kGatedNegatedConstant,       // -c if gate else 0
};

std::string_view ExpressionFormName(ExpressionForm form);
std::optional<ExpressionForm> ParseExpressionForm(std::string_view name);

// One weighted term: weight_param * base(features).
//
// For the gated forms `feature` is the gate; `negate_gate` turns it into
// "not feature", and a `threshold_feature` / `threshold` pair adds the
// conjunct "threshold_feature > threshold". The gate is evaluated first and
// an inactive gate short-circuits, so absent values behind it are tolerated.
struct RewardTerm {
  std::string name;
  std::string weight_param;
  ExpressionForm form = ExpressionForm::kNegatedFeature;
  std::string feature;
  bool negate_gate = false;
  double constant = 1.0;
  std::optional<double> threshold;
  std::string threshold_feature;

  // Unweighted term value. Throws RewardError naming the term and feature
  // when a required feature is missing or absent.
  double Base(const FeatureRecord& features) const;
  // Feature names this term may read.
  std::vector<std::string> Features() const;

  bool operator==(const RewardTerm& other) const = default;
};

bool HasTermSuffix(std::string_view name);

class RewardSpec {
 public:
  // Validates naming, parameter references and form-specific fields.
  // Throws ValidationError listing every violation.
  RewardSpec(std::string name, std::vector<RewardTerm> terms,
             ParamVector defaults);

  const std::string& name() const { return name_; }
  const std::vector<RewardTerm>& terms() const { return terms_; }
  const ParamVector& defaults() const { return defaults_; }
  // Index into the parameter vector of each term's weight.
  const std::vector<std::size_t>& weight_index() const { return weight_index_; }
  // Sorted, deduplicated.
  std::vector<std::string> ReferencedFeatures() const;

  // Throws ValidationError when a referenced feature is not in `schema`.
  void CheckFeatureSchema(std::span<const std::string> schema) const;
  // Throws RewardError unless params has the same names in the same order.
  void CheckConforms(const ParamVector& params) const;

  bool operator==(const RewardSpec& other) const;

 private:
  std::string name_;
  std::vector<RewardTerm> terms_;
  ParamVector defaults_;
  std::vector<std::size_t> weight_index_;
};

// Weighted sum of term values.
double EvaluateReward(const RewardSpec& spec, const ParamVector& params,
                      const FeatureRecord& features);
// Sum of per-step rewards; errors carry the step index.
double EvaluateReturn(const RewardSpec& spec, const ParamVector& params,
                      const Trajectory& traj);
double EvaluateReturn(const RewardSpec& spec, const ParamVector& params,
                      std::span<const FeatureRecord> features);

// Reward of stored features under new parameters.
inline double Relabel(const FeatureRecord& features, const RewardSpec& spec,
                      const ParamVector& new_params) {
  return EvaluateReward(spec, new_params, features);
}

// Per-parameter coefficient sums of a trajectory: return(theta) equals
// dot(theta, coefficients) up to floating-point summation order. Used by
// samplers that evaluate many parameter vectors against fixed features.
std::vector<double> ReturnCoefficients(const RewardSpec& spec,
                                       std::span<const FeatureRecord> features);

}  // namespace selfalign

#endif  // SELFALIGN_REWARD_H_
