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

// Runs the acceptance criteria and prints one PASS/FAIL line for each.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"
#include "selfalign/commands.h"
#include "selfalign/envs.h"
#include "selfalign/llm_client.h"
#include "selfalign/preference.h"
#include "selfalign/ranking.h"
#include "selfalign/reward_io.h"
#include "selfalign/run_config.h"
#include "support/fixtures.h"
#include "support/recovery.h"
#include "support/reference.h"

namespace selfalign {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and budgets.
constexpr double kLikelihoodTolerance = 1e-9;
constexpr int kLikelihoodPoints = 64;
constexpr double kLikelihoodSeconds = 1.0;
constexpr double kRecoveryAgreement = 0.95;
constexpr double kRecoverySeconds = 30.0;
constexpr int kDiscrepancyTrials = 1000;
constexpr double kDiscrepancySeconds = 5.0;
constexpr double kFixedCeiling = 0.20;
constexpr double kSelfFloor = 0.80;
constexpr int kMaxIterations = 40;
constexpr double kEndToEndSeconds = 600.0;
constexpr double kFinalFraction = 0.20;
constexpr std::size_t kFinalInconsistency = 1;
constexpr double kCurriculumFloor = 0.60;
constexpr double kCurriculumSeconds = 600.0;
constexpr double kTransportScale = 0.01;
constexpr std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string Join(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : " ") + fmt::format("{:.3f}", x);
  return out;
}

Outcome Likelihood() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> r(-50.0, 50.0);
  std::uniform_real_distribution<double> b(0.0, 5.0);
  double worst = 0.0;
  bool exact = true;
  for (int i = 0; i < kLikelihoodPoints; ++i) {
    const double ri = r(rng), rj = r(rng), beta = b(rng);
    const double p = PairwiseLikelihood(ri, rj, beta);
    worst = std::max(worst, static_cast<double>(std::fabs(
                                static_cast<long double>(p) - testing::ReferencePairProbability(ri, rj, beta))));
    const double q = PairwiseLikelihood(rj, ri, beta);
    exact &= p + q == 1.0;
    exact &= PairwiseLikelihood(ri + 3.0, rj + 3.0, beta) == PairwiseLikelihood(ri, rj, beta) ||
             std::fabs(PairwiseLikelihood(ri + 3.0, rj + 3.0, beta) - p) < kLikelihoodTolerance;
    exact &= PairwiseLikelihood(ri, ri, beta) == 0.5;
  }
  const double t = Seconds(start);
  return {worst <= kLikelihoodTolerance && exact && t < kLikelihoodSeconds,
          fmt::format("max |err| {:.2e} (tol {:.0e}), identities {}, {:.3f}s", worst,
                      kLikelihoodTolerance, exact ? "exact" : "violated", t)};
}

Outcome Recovery() {
  const auto start = Clock::now();
  std::vector<double> agreement;
  for (std::uint64_t seed : kSeeds) agreement.push_back(testing::RunRecovery(seed).agreement_with_grid);
  const double t = Seconds(start);
  const double worst = *std::min_element(agreement.begin(), agreement.end());
  return {worst >= kRecoveryAgreement && t < kRecoverySeconds,
          fmt::format("agreement with grid optimum per seed [{}] (min {:.3f}, need {:.2f}), {:.2f}s",
                      Join(agreement), worst, kRecoveryAgreement, t)};
}

Outcome Discrepancy() {
  const auto start = Clock::now();
  std::mt19937_64 rng(77);
  int mismatches = 0;
  for (int trial = 0; trial < kDiscrepancyTrials; ++trial) {
    const int n = 2 + trial % 9;
    Ranking a, b;
    for (int i = 0; i < n; ++i) a.ids.push_back(i * 3 + 1);
    b.ids = a.ids;
    std::shuffle(a.ids.begin(), a.ids.end(), rng);
    std::shuffle(b.ids.begin(), b.ids.end(), rng);
    const auto got = DiscrepancyPairs(a, b);
    const auto want = testing::BruteForceDiscordant(a.ids, b.ids);
    if (got != want) ++mismatches;
  }
  const double t = Seconds(start);
  return {mismatches == 0 && t < kDiscrepancySeconds,
          fmt::format("{} mismatches over {} ranking pairs of size 2-10, {:.3f}s", mismatches,
                      kDiscrepancyTrials, t)};
}

RunConfig EndToEndConfig(const std::string& condition, bool update, const fs::path& out) {
  RunConfig c;
  c.condition = condition;
  c.env = "pick-carry";
  const RewardSpec spec = BuiltinSpec("pick-carry");
  c.initial_params["transport_weight"] = spec.defaults().value("transport_weight") * kTransportScale;
  c.oracle.beta = 0.9;
  c.alignment.max_iterations = kMaxIterations;
  c.alignment.update_rewards = update;
  c.out = out;
  c.seeds.assign(std::begin(kSeeds), std::end(kSeeds));
  return c;
}

struct ConditionRuns {
  std::vector<fs::path> dirs;
  std::vector<ExperimentResult> results;
  double seconds = 0.0;
};

ConditionRuns RunCondition(const RunConfig& config) {
  ConditionRuns runs;
  const auto start = Clock::now();
  for (std::uint64_t seed : config.seeds) {
    const fs::path dir = SeedDirectory(config, seed);
    runs.dirs.push_back(dir);
    runs.results.push_back(RunSeed(config, seed, dir));
  }
  runs.seconds = Seconds(start);
  return runs;
}

std::vector<double> FinalSuccess(const ConditionRuns& runs) {
  std::vector<double> out;
  for (const auto& r : runs.results) out.push_back(r.final_success);
  return out;
}

Outcome EndToEnd(const ConditionRuns& fixed, const ConditionRuns& self) {
  const auto f = FinalSuccess(fixed), s = FinalSuccess(self);
  int within = 0;
  for (const auto& r : self.results) within += r.iterations <= kMaxIterations;
  const double t = fixed.seconds + self.seconds;
  const bool pass = Mean(f) < kFixedCeiling && Mean(s) >= kSelfFloor &&
                    within == static_cast<int>(self.results.size()) && t < kEndToEndSeconds;
  std::vector<double> iters;
  for (const auto& r : self.results) iters.push_back(r.iterations);
  return {pass,
          fmt::format("(a) fixed mean {:.3f} [{}] < {:.2f}; (b) self-alignment mean {:.3f} [{}] >= "
                      "{:.2f} after iterations [{}]; {:.1f}s",
                      Mean(f), Join(f), kFixedCeiling, Mean(s), Join(s), kSelfFloor,
                      fmt::format("{}", fmt::join(iters, " ")), t)};
}

Outcome Convergence(const ConditionRuns& self) {
  int violations = 0;
  std::size_t worst_tail = 0;
  std::string tails;
  for (std::size_t k = 0; k < self.results.size(); ++k) {
    const auto& reports = self.results[k].reports;
    for (const auto& r : reports) {
      if (r.accepted && r.inconsistency_after > r.inconsistency_before) ++violations;
    }
    const std::size_t n = reports.size();
    const std::size_t tail = static_cast<std::size_t>(std::ceil(kFinalFraction * n));
    std::string counts;
    for (std::size_t i = n - tail; i < n; ++i) {
      worst_tail = std::max(worst_tail, reports[i].inconsistency_before);
      counts += (counts.empty() ? "" : ",") + std::to_string(reports[i].inconsistency_before);
    }
    tails += fmt::format("{}seed {}: [{}]", k ? "; " : "", kSeeds[k], counts);
  }
  return {violations == 0 && worst_tail <= kFinalInconsistency,
          fmt::format("{} accepted updates raised inconsistency; final-20% batch inconsistency "
                      "max {} (need <= {}) {}",
                      violations, worst_tail, kFinalInconsistency, tails)};
}

RunConfig CurriculumConfig(const fs::path& out) {
  RunConfig c;
  c.condition = "curriculum";
  c.env = "pick-carry";
  const RewardSpec spec = BuiltinSpec("pick-carry");
  for (std::size_t i = 0; i < spec.defaults().size(); ++i) {
    const std::string& name = spec.defaults().names()[i];
    if (name != "approach_weight") c.initial_params[name] = spec.defaults().domain(i).min;
  }
  c.oracle.beta = 0.9;
  c.alignment.max_iterations = kMaxIterations;
  // One greedy rollout plus replayed experience keeps the batch consistent
  // while the policy is stuck, which is the regime the criterion targets.
  c.alignment.rollout_samples = 1;
  c.alignment.histogram_samples = 5;
  c.out = out;
  c.seeds.assign(std::begin(kSeeds), std::end(kSeeds));
  return c;
}

Outcome Curriculum(const ConditionRuns& runs) {
  bool fired_everywhere = true;
  bool monotone = true;
  bool each_raised = true;
  std::string sequences;
  for (std::size_t k = 0; k < runs.results.size(); ++k) {
    bool fired = false;
    std::vector<double> transport;
    for (const auto& r : runs.results[k].reports) {
      fired |= r.adjustment_fired;
      if (r.adjustment_fired && r.accepted) {
        transport.push_back(r.params_after.value("transport_weight"));
        each_raised &= r.params_after.value("transport_weight") >
                       r.params_before.value("transport_weight");
      }
    }
    fired_everywhere &= fired;
    for (std::size_t i = 1; i < transport.size(); ++i) monotone &= transport[i] > transport[i - 1];
    monotone &= !transport.empty();
    sequences += fmt::format("{}seed {}: [{}]", k ? "; " : "", kSeeds[k], Join(transport));
  }
  const auto s = FinalSuccess(runs);
  return {fired_everywhere && monotone && Mean(s) >= kCurriculumFloor &&
              runs.seconds < kCurriculumSeconds,
          fmt::format("fired in every seed: {}; accepted transport weights strictly increasing: "
                      "{} ({}); each accepted adjustment raised it: {}; final success mean {:.3f} "
                      "[{}] >= {:.2f}; {:.1f}s",
                      fired_everywhere ? "yes" : "no", monotone ? "yes" : "no", sequences,
                      each_raised ? "yes" : "no", Mean(s),
                      Join(s), kCurriculumFloor, runs.seconds)};
}

Outcome Determinism(const std::vector<fs::path>& first, const std::vector<fs::path>& second) {
  int differing = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    for (const char* file : {"metrics.csv", "params.csv"}) {
      const std::string a = ReadFile(first[i] / file), b = ReadFile(second[i] / file);
      if (a.empty() || a != b) ++differing;
    }
  }
  return {differing == 0, fmt::format("{} of {} metrics/params files differ between executions",
                                       differing, 2 * first.size())};
}

Outcome Replay(const std::vector<fs::path>& dirs) {
  int failed = 0;
  std::ostringstream sink;
  std::string names;
  for (const auto& d : dirs) {
    if (CmdReplay(d, sink, sink) != kExitOk) {
      ++failed;
      names += " " + d.string();
    }
  }
  return {failed == 0, fmt::format("{} of {} run directories failed replay{}", failed, dirs.size(),
                                   names)};
}

Outcome LlmContract() {
  httplib::Server server;
  constexpr std::uint64_t kPrompt = 1234, kCompletion = 321;
  server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    const std::string reply =
        "Data sample 5 has finished the insertion, so it is ranked first.\n"
        "The samples further from the hole follow in order.\n"
        "The final result is:\n[5, 4, 3, 2, 1, 0]";
    nlohmann::json body{{"choices", {{{"message", {{"role", "assistant"}, {"content", reply}}}}}},
                        {"usage", {{"prompt_tokens", kPrompt}, {"completion_tokens", kCompletion}}}};
    res.set_content(body.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  Outcome out;
  try {
    const auto env = MakeEnv("drawer-pull-1d");
    const RewardSpec spec = BuiltinSpec("open-drawer");
    std::vector<Trajectory> batch;
    for (std::int64_t id = 0; id < 6; ++id) {
      Trajectory t = testing::DrawerExampleBatch()[static_cast<std::size_t>(id % 4)];
      t.id = id;
      batch.push_back(std::move(t));
    }
    LlmOracle oracle(env->spec(),
                     MakeHttpTransport({fmt::format("http://127.0.0.1:{}/v1/chat/completions", port),
                                        "", 10}),
                     LlmOracleConfig{});
    const OracleRanking r = oracle.Rank(batch, spec, spec.defaults(), 1);
    const std::vector<std::int64_t> expected{5, 4, 3, 2, 1, 0};
    out.pass = r.ranking.ids == expected && oracle.tokens_used() == kPrompt + kCompletion;
    out.detail = fmt::format("ranking [{}], tokens {} (stub reported {})",
                             fmt::join(r.ranking.ids, ", "), oracle.tokens_used(),
                             kPrompt + kCompletion);
  } catch (const std::exception& e) {
    out.detail = std::string("error: ") + e.what();
  }
  server.stop();
  listener.join();
  return out;
}

class Reporter {
 public:
  explicit Reporter(const fs::path& file) : file_(file) {}

  void Line(const std::string& text) {
    std::cout << text << std::endl;
    file_ << text << '\n';
    file_.flush();
  }
  void Criterion(int number, const std::string& title, const Outcome& o) {
    Line(fmt::format("criterion {} {}: {} - {}", number, title, o.pass ? "PASS" : "FAIL",
                     o.detail));
    failures_ += !o.pass;
  }
  int failures() const { return failures_; }

 private:
  std::ofstream file_;
  int failures_ = 0;
};

}  // namespace
}  // namespace selfalign

int main(int argc, char** argv) {
  using namespace selfalign;
  CLI::App app{"selfalign acceptance criteria"};
  std::string out = "acceptance_runs";
  std::string report_path;
  app.add_option("--out", out, "directory for run outputs");
  app.add_option("--report", report_path, "also write the report here (default: <out>/report.txt)");
  CLI11_PARSE(app, argc, argv);
  const fs::path root(out);
  fs::create_directories(root);
  Reporter report(report_path.empty() ? root / "report.txt" : fs::path(report_path));
  report.Criterion(1, "likelihood correctness", Likelihood());
  report.Criterion(2, "MAP recovery", Recovery());
  report.Criterion(3, "discrepancy oracle equivalence", Discrepancy());

  const ConditionRuns fixed = RunCondition(EndToEndConfig("fixed", false, root / "fixed"));
  const ConditionRuns self =
      RunCondition(EndToEndConfig("self-alignment", true, root / "self-alignment"));
  report.Criterion(4, "end-to-end self-alignment benefit", EndToEnd(fixed, self));
  report.Criterion(5, "inconsistency convergence", Convergence(self));

  const ConditionRuns curriculum = RunCondition(CurriculumConfig(root / "curriculum"));
  report.Criterion(6, "active-adjustment curriculum", Curriculum(curriculum));

  const ConditionRuns fixed_again = RunCondition(EndToEndConfig("fixed", false, root / "repeat" / "fixed"));
  const ConditionRuns self_again =
      RunCondition(EndToEndConfig("self-alignment", true, root / "repeat" / "self-alignment"));
  std::vector<fs::path> first = fixed.dirs, second = fixed_again.dirs;
  first.insert(first.end(), self.dirs.begin(), self.dirs.end());
  second.insert(second.end(), self_again.dirs.begin(), self_again.dirs.end());
  report.Criterion(7, "determinism", Determinism(first, second));

  std::vector<fs::path> all = first;
  all.insert(all.end(), curriculum.dirs.begin(), curriculum.dirs.end());
  report.Criterion(8, "replay self-consistency", Replay(all));
  report.Criterion(9, "LLM-backend contract", LlmContract());

  report.Line(fmt::format("{} of 9 criteria passed", 9 - report.failures()));
  return report.failures() == 0 ? 0 : 1;
}
