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

#include "selfalign/inference.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "selfalign/errors.h"
#include "selfalign/seeding.h"

namespace selfalign {

void MHConfig::Validate() const {
  if (burn_in < 0) throw ConfigError("mh.burn_in must be >= 0");
  if (n_samples < 1) throw ConfigError("mh.n_samples must be >= 1");
  if (!(proposal_sigma > 0.0) || !std::isfinite(proposal_sigma)) {
    throw ConfigError("mh.proposal_sigma must be > 0");
  }
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Returns are linear in the parameters, so each trajectory reduces to a
// coefficient row and the log-posterior to dot products.
class LinearPosterior {
 public:
  LinearPosterior(const PreferenceDataset& dataset, const RewardSpec& spec,
                  const std::optional<BallConstraint>& ball)
      : beta_(dataset.beta), ball_(ball) {
    for (const auto& t : dataset.trajectories) {
      coef_.push_back(ReturnCoefficients(spec, t.features));
    }
    for (const auto& p : dataset.pairs) {
      pairs_.emplace_back(dataset.IndexOf(p.preferred), dataset.IndexOf(p.dispreferred));
    }
    returns_.resize(coef_.size());
  }

  double operator()(const ParamVector& params) {
    if (!params.InActiveDomain()) return kNegInf;
    if (ball_ && params.DistanceTo(ball_->center) > ball_->radius) return kNegInf;
    const auto theta = params.values();
    for (std::size_t i = 0; i < coef_.size(); ++i) {
      double r = 0.0;
      for (std::size_t k = 0; k < theta.size(); ++k) r += coef_[i][k] * theta[k];
      returns_[i] = r;
    }
    double total = 0.0;
    for (const auto& [a, b] : pairs_) {
      total += LogPairwiseLikelihood(returns_[a], returns_[b], beta_);
    }
    return total;
  }

 private:
  double beta_;
  std::optional<BallConstraint> ball_;
  std::vector<std::vector<double>> coef_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<double> returns_;
};

}  // namespace

PosteriorResult RunMetropolisHastings(const PreferenceDataset& dataset,
                                      const RewardSpec& spec,
                                      const ParamVector& init,
                                      const MHConfig& config,
                                      const std::optional<BallConstraint>& ball) {
  config.Validate();
  dataset.Validate();
  spec.CheckConforms(init);

  LinearPosterior log_post(dataset, spec, ball);
  ParamVector current = init;
  double current_lp = log_post(current);
  if (!std::isfinite(current_lp)) {
    throw Error("initial parameters have zero posterior mass (outside the active domain or ball)");
  }
  std::vector<double> unit = Normalize(current);

  std::vector<std::size_t> free_dims;
  for (std::size_t i = 0; i < init.size(); ++i) {
    if (init.domain(i).active_max > init.domain(i).active_min) free_dims.push_back(i);
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> step(0.0, config.proposal_sigma);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  PosteriorResult result;
  result.map_estimate = current;
  result.map_log_posterior = current_lp;
  result.samples.reserve(config.n_samples);

  const int total = config.burn_in + config.n_samples;
  int accepted = 0;
  std::vector<double> proposal_unit(unit.size());
  for (int s = 0; s < total; ++s) {
    proposal_unit = unit;
    for (std::size_t i : free_dims) {
      proposal_unit[i] = std::clamp(unit[i] + step(rng), 0.0, 1.0);
    }
    ParamVector proposal = Denormalize(init, proposal_unit);
    const double lp = log_post(proposal);
    const double u = uniform(rng);
    const bool accept = std::isfinite(lp) && std::log(u) < lp - current_lp;
    if (accept) {
      unit = proposal_unit;
      current = std::move(proposal);
      current_lp = lp;
      ++accepted;
      if (current_lp > result.map_log_posterior) {
        result.map_log_posterior = current_lp;
        result.map_estimate = current;
      }
    }
    if (config.record_trace) result.trace.push_back({s, current_lp, accept});
    if (s >= config.burn_in) result.samples.push_back(current);
  }
  result.acceptance_rate = static_cast<double>(accepted) / total;
  return result;
}

void WriteChainTrace(const std::filesystem::path& path,
                     std::span<const ChainStep> trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "step,log_posterior,accepted\n";
  for (const auto& s : trace) {
    out << s.step << ',' << fmt::format("{:.17g}", s.log_posterior) << ','
        << (s.accepted ? 1 : 0) << '\n';
  }
}

std::optional<std::size_t> SelectCandidate(std::span<const Candidate> candidates,
                                           std::size_t discrepancy_before) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Candidate& c = candidates[i];
    if (!c.moved) continue;
    if (!best) {
      best = i;
      continue;
    }
    const Candidate& b = candidates[*best];
    if (c.discrepancy < b.discrepancy ||
        (c.discrepancy == b.discrepancy && c.distance_to_current < b.distance_to_current)) {
      best = i;
    }
  }
  if (best && candidates[*best].discrepancy > discrepancy_before) return std::nullopt;
  return best;
}

std::size_t DatasetDiscrepancy(const ParamVector& params,
                               const PreferenceDataset& dataset,
                               const RewardSpec& spec, const Ranking* reference) {
  const Ranking induced = RankByReward(dataset.trajectories, spec, params);
  if (reference != nullptr) return CountDiscrepancy(induced, *reference);
  std::vector<std::size_t> pos(dataset.trajectories.size());
  for (std::size_t i = 0; i < induced.ids.size(); ++i) {
    pos[dataset.IndexOf(induced.ids[i])] = i;
  }
  std::size_t violated = 0;
  for (const auto& p : dataset.pairs) {
    if (pos[dataset.IndexOf(p.preferred)] > pos[dataset.IndexOf(p.dispreferred)]) ++violated;
  }
  return violated;
}

namespace {

ParamVector ClampToActive(const ParamVector& params) {
  ParamVector out = params;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const ParamDomain& d = out.domain(i);
    out.Set(i, std::clamp(out.value(i), d.active_min, d.active_max));
  }
  return out;
}

}  // namespace

CandidateUpdate RadiusConstrainedUpdate(const ParamVector& current,
                                        const PreferenceDataset& dataset,
                                        const RewardSpec& spec,
                                        std::span<const double> radii,
                                        const MHConfig& config,
                                        const Ranking* reference) {
  if (radii.empty()) throw ConfigError("radius list is empty");
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("radii must be positive");
  }
  config.Validate();
  dataset.Validate();

  // Discrepancy is measured with the domain-free parameters so that a
  // temporarily restricted domain does not reject the current point.
  ParamVector unrestricted = current;
  unrestricted.RestoreDomains();

  CandidateUpdate out;
  out.params = current;
  out.discrepancy_before = DatasetDiscrepancy(unrestricted, dataset, spec, reference);
  out.discrepancy_after = out.discrepancy_before;
  if (current.InActiveDomain() && out.discrepancy_before == 0) return out;

  const ParamVector init = ClampToActive(current);
  std::vector<std::future<Candidate>> futures;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    futures.push_back(std::async(std::launch::async, [&, i] {
      MHConfig chain_config = config;
      chain_config.seed = DeriveSeed(config.seed, {i});
      chain_config.record_trace = false;
      PosteriorResult post = RunMetropolisHastings(
          dataset, spec, init, chain_config, BallConstraint{current, radii[i]});
      Candidate c;
      c.params = post.map_estimate;
      c.radius = radii[i];
      ParamVector scored = c.params;
      scored.RestoreDomains();
      c.discrepancy = DatasetDiscrepancy(scored, dataset, spec, reference);
      c.distance_to_current = c.params.DistanceTo(current);
      c.moved = !std::equal(c.params.values().begin(), c.params.values().end(),
                            init.values().begin());
      return c;
    }));
  }
  for (auto& f : futures) out.candidates.push_back(f.get());

  const auto best = SelectCandidate(out.candidates, out.discrepancy_before);
  if (!best) return out;
  const Candidate& c = out.candidates[*best];
  out.params = c.params;
  out.radius = c.radius;
  out.discrepancy_after = c.discrepancy;
  out.distance_to_current = c.distance_to_current;
  out.changed = !(c.params.values().size() == current.values().size() &&
                  std::equal(c.params.values().begin(), c.params.values().end(),
                             current.values().begin()));
  return out;
}

}  // namespace selfalign
