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

#include "selfalign/commands.h"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "selfalign/errors.h"
#include "selfalign/llm_client.h"
#include "selfalign/ranking.h"
#include "selfalign/reward_io.h"
#include "selfalign/trajectory_log.h"

namespace selfalign {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kReplayTolerance = 1e-9;

std::string Num(double v) { return fmt::format("{}", v); }

std::string IterationName(int iteration) { return fmt::format("{:03d}", iteration); }

std::string ParamsRow(int iteration, const ParamVector& params) {
  std::string row = std::to_string(iteration);
  for (double v : params.values()) row += "," + Num(v);
  return row;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

void WriteBatch(const fs::path& path, const IterationReport& r, const RewardSpec& spec) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& traj : r.batch) WriteTrajectoryLog(out, traj);
  for (const auto& traj : r.batch) {
    ordered_json line;
    line["kind"] = "summary";
    line["traj"] = traj.id;
    line["return_before"] = EvaluateReturn(spec, r.params_before, traj);
    line["return_after"] = EvaluateReturn(spec, r.params_after, traj);
    line["success"] = traj.success;
    out << line.dump() << '\n';
  }
  ordered_json ranking;
  ranking["kind"] = "ranking";
  ranking["oracle_failed"] = r.oracle_failed;
  ranking["reward"] = r.reward_ranking.ids;
  ranking["oracle"] = r.oracle_ranking.ids;
  out << ranking.dump() << '\n';
}

struct MetricsRow {
  int iteration = 0;
  std::size_t inconsistency_before = 0;
  std::size_t inconsistency_after = 0;
  double success_rate = 0.0;
  bool accepted = false;
  bool adjustment_fired = false;
};

// Parses metrics.csv; throws Error naming the row on malformed content.
std::vector<MetricsRow> ReadMetrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw Error(fmt::format("{}: unexpected header '{}'", path.string(), line));
  }
  std::vector<MetricsRow> rows;
  int row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    const auto cells = SplitCsv(line);
    if (cells.size() != 6) {
      throw Error(fmt::format("metrics.csv row {}: expected 6 cells, found {}", row_no,
                              cells.size()));
    }
    try {
      MetricsRow r;
      r.iteration = std::stoi(cells[0]);
      r.inconsistency_before = std::stoul(cells[1]);
      r.inconsistency_after = std::stoul(cells[2]);
      r.success_rate = std::stod(cells[3]);
      r.accepted = std::stoi(cells[4]) != 0;
      r.adjustment_fired = std::stoi(cells[5]) != 0;
      rows.push_back(r);
    } catch (const std::exception&) {
      throw Error(fmt::format("metrics.csv row {}: unparseable cell in '{}'", row_no, line));
    }
  }
  return rows;
}

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace

std::shared_ptr<Oracle> MakeOracle(const RunConfig& config, const EnvSpec& env,
                                   std::uint64_t seed) {
  const OracleSettings& o = config.oracle;
  if (o.backend == OracleBackend::kScripted) {
    ScriptedOracleConfig sc;
    sc.beta = o.beta;
    sc.swap = o.swap;
    sc.seed = seed;
    return std::make_shared<ScriptedOracle>(env, sc);
  }
  const char* key = std::getenv(o.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError(fmt::format("oracle.api_key_env: environment variable {} is not set",
                                  o.api_key_env));
  }
  HttpEndpoint endpoint;
  endpoint.url = o.endpoint;
  endpoint.api_key = key;
  endpoint.timeout_seconds = o.timeout_seconds;
  LlmOracleConfig lc;
  lc.model = o.model;
  lc.temperature = o.temperature;
  return std::make_shared<LlmOracle>(env, std::shared_ptr<ChatTransport>(MakeHttpTransport(endpoint)),
                                     lc);
}

fs::path SeedDirectory(const RunConfig& config, std::uint64_t seed) {
  return config.out / fmt::format("seed_{}", seed);
}

ExperimentResult RunSeed(const RunConfig& config, std::uint64_t seed, const fs::path& dir,
                         std::shared_ptr<Oracle> oracle) {
  RunConfig snapshot = config;
  snapshot.seeds = {seed};
  snapshot.Validate();
  const auto env = MakeEnv(config.env);
  RewardSpec spec = ResolveSpec(config);
  ParamVector params = InitialParams(config, spec);
  if (!oracle) oracle = MakeOracle(config, env->spec(), seed);

  fs::create_directories(dir);
  fs::remove_all(dir / "oracle");
  fs::remove_all(dir / "batches");
  fs::create_directories(dir / "oracle");
  fs::create_directories(dir / "batches");
  SaveRunConfig(snapshot, dir / "config.json");
  SaveRewardSpec(spec, dir / "reward_spec.json");

  std::ofstream metrics(dir / "metrics.csv");
  std::ofstream params_csv(dir / "params.csv");
  if (!metrics || !params_csv) throw Error("cannot write run files in " + dir.string());
  metrics << kMetricsHeader << '\n';
  params_csv << "iteration";
  for (const auto& n : params.names()) params_csv << ',' << n;
  params_csv << '\n' << ParamsRow(0, params) << '\n';

  AlignmentConfig alignment = config.alignment;
  alignment.seed = seed;
  AlignmentRun run(*env, spec, params, oracle, alignment);
  int failures = 0;
  ExperimentResult result = RunExperiment(run, alignment, [&](const IterationReport& r) {
    metrics << fmt::format("{},{},{},{},{},{}\n", r.iteration, r.inconsistency_before,
                           r.inconsistency_after, Num(r.success_rate), r.accepted ? 1 : 0,
                           r.adjustment_fired ? 1 : 0);
    metrics.flush();
    params_csv << ParamsRow(r.iteration, r.params_after) << '\n';
    params_csv.flush();
    std::ofstream transcript(dir / "oracle" / (IterationName(r.iteration) + ".txt"));
    transcript << (r.oracle_failed ? "oracle error: " + r.oracle_error : r.transcript) << '\n';
    WriteBatch(dir / "batches" / (IterationName(r.iteration) + ".jsonl"), r, spec);
    if (r.oracle_failed) ++failures;
  });

  ordered_json summary;
  summary["condition"] = config.condition;
  summary["env"] = config.env;
  summary["seed"] = seed;
  summary["initial_success"] = result.initial_success;
  summary["final_success"] = result.final_success;
  summary["iterations"] = result.iterations;
  summary["reached_target"] = result.reached_target;
  summary["oracle_failures"] = failures;
  summary["tokens"] = result.tokens;
  summary["wall_seconds"] = result.wall_seconds;
  summary["final_params"] = ordered_json::object();
  for (std::size_t i = 0; i < result.final_params.size(); ++i) {
    summary["final_params"][result.final_params.names()[i]] = result.final_params.value(i);
  }
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
  return result;
}

int CmdRun(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.Validate();
    ResolveSpec(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (std::uint64_t seed : config.seeds) {
    const fs::path dir = SeedDirectory(config, seed);
    try {
      ExperimentResult r = RunSeed(config, seed, dir);
      out << fmt::format("{} seed {}: {} iterations, success {:.2f} -> {:.2f} ({})\n",
                         config.condition, seed, r.iterations, r.initial_success,
                         r.final_success, dir.string());
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const std::exception& e) {
      err << fmt::format("seed {} failed: {}\n", seed, e.what());
      fs::create_directories(dir);
      ordered_json summary;
      summary["condition"] = config.condition;
      summary["seed"] = seed;
      summary["error"] = e.what();
      std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
    }
  }
  return kExitOk;
}

int CmdReplay(const fs::path& dir, std::ostream& out, std::ostream& err) {
  std::vector<std::string> missing;
  for (const char* name :
       {"config.json", "reward_spec.json", "metrics.csv", "params.csv", "summary.json"}) {
    if (!fs::exists(dir / name)) missing.push_back(name);
  }
  if (!fs::is_directory(dir / "batches")) missing.push_back("batches/");
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    err << fmt::format("{}: missing {}\n", dir.string(), list);
    return kExitConfig;
  }

  try {
    const RewardSpec spec = LoadRewardSpec(dir / "reward_spec.json");
    const std::vector<MetricsRow> rows = ReadMetrics(dir / "metrics.csv");

    std::ifstream pin(dir / "params.csv");
    std::string line;
    std::getline(pin, line);
    std::string expected = "iteration";
    for (const auto& n : spec.defaults().names()) expected += "," + n;
    if (line != expected) {
      err << fmt::format("params.csv: header '{}' does not match the spec ('{}')\n", line,
                         expected);
      return kExitRuntime;
    }
    std::map<int, ParamVector> params;
    while (std::getline(pin, line)) {
      if (line.empty()) continue;
      const auto cells = SplitCsv(line);
      if (cells.size() != spec.defaults().size() + 1) {
        err << fmt::format("params.csv: malformed row '{}'\n", line);
        return kExitRuntime;
      }
      std::vector<double> v;
      for (std::size_t i = 1; i < cells.size(); ++i) v.push_back(std::stod(cells[i]));
      ParamVector p = spec.defaults();
      p.SetValues(v);
      params.emplace(std::stoi(cells[0]), std::move(p));
    }

    int bad = 0;
    auto report = [&](std::size_t row, int iteration, const std::string& what) {
      err << fmt::format("metrics.csv row {} (iteration {}): {}\n", row, iteration, what);
      ++bad;
    };
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const MetricsRow& m = rows[r];
      const std::size_t row_no = r + 1;
      if (!params.count(m.iteration - 1) || !params.count(m.iteration)) {
        report(row_no, m.iteration, "no matching params.csv rows");
        continue;
      }
      const ParamVector& before = params.at(m.iteration - 1);
      const ParamVector& after = params.at(m.iteration);
      if (!m.accepted && !(before == after)) {
        report(row_no, m.iteration, "parameters changed although accepted is 0");
      }
      const fs::path batch_path = dir / "batches" / (IterationName(m.iteration) + ".jsonl");
      std::ifstream bin(batch_path);
      if (!bin) {
        report(row_no, m.iteration, "missing " + batch_path.string());
        continue;
      }
      std::stringstream buffer;
      buffer << bin.rdbuf();
      std::istringstream steps(buffer.str());
      const std::vector<Trajectory> batch = ReadTrajectoryLog(steps);

      std::map<std::int64_t, std::pair<double, double>> logged;
      Ranking oracle{{}, RankingProvenance::kOracle};
      bool failed = true;
      std::istringstream records(buffer.str());
      while (std::getline(records, line)) {
        if (line.find("\"kind\"") == std::string::npos) continue;
        const json doc = json::parse(line);
        if (doc.at("kind") == "summary") {
          logged[doc.at("traj").get<std::int64_t>()] = {doc.at("return_before").get<double>(),
                                                       doc.at("return_after").get<double>()};
        } else if (doc.at("kind") == "ranking") {
          failed = doc.at("oracle_failed").get<bool>();
          oracle.ids = doc.at("oracle").get<std::vector<std::int64_t>>();
        }
      }
      if (failed) {
        if (m.inconsistency_before != 0 || m.inconsistency_after != 0) {
          report(row_no, m.iteration, "oracle failed but inconsistency is nonzero");
        }
        continue;
      }

      std::vector<std::int64_t> ids;
      std::vector<double> ret_before, ret_after;
      for (const auto& traj : batch) {
        ids.push_back(traj.id);
        ret_before.push_back(EvaluateReturn(spec, before, traj));
        ret_after.push_back(EvaluateReturn(spec, after, traj));
        auto it = logged.find(traj.id);
        if (it == logged.end()) {
          report(row_no, m.iteration, fmt::format("trajectory {} has no summary line", traj.id));
          continue;
        }
        if (std::abs(it->second.first - ret_before.back()) > kReplayTolerance ||
            std::abs(it->second.second - ret_after.back()) > kReplayTolerance) {
          report(row_no, m.iteration,
                 fmt::format("trajectory {} return differs from the log", traj.id));
        }
      }
      const std::size_t inc_before = CountDiscrepancy(RankByReturns(ids, ret_before), oracle);
      const std::size_t inc_after = CountDiscrepancy(RankByReturns(ids, ret_after), oracle);
      if (inc_before != m.inconsistency_before) {
        report(row_no, m.iteration,
               fmt::format("inconsistency_before is {}, recomputed {}", m.inconsistency_before,
                           inc_before));
      }
      if (inc_after != m.inconsistency_after) {
        report(row_no, m.iteration,
               fmt::format("inconsistency_after is {}, recomputed {}", m.inconsistency_after,
                           inc_after));
      }
    }
    if (bad > 0) {
      err << fmt::format("{}: {} mismatch(es)\n", dir.string(), bad);
      return kExitRuntime;
    }
    out << fmt::format("{}: {} iterations replayed, all values agree\n", dir.string(),
                       rows.size());
    return kExitOk;
  } catch (const std::exception& e) {
    err << "replay failed: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int CmdCompare(const std::vector<fs::path>& dirs, std::ostream& out, std::ostream& err) {
  if (dirs.size() < 2) {
    err << "compare needs at least two run directories\n";
    return kExitConfig;
  }
  std::vector<fs::path> seed_dirs;
  for (const auto& d : dirs) {
    if (fs::exists(d / "summary.json")) {
      seed_dirs.push_back(d);
      continue;
    }
    std::vector<std::pair<std::uint64_t, fs::path>> found;
    if (fs::is_directory(d)) {
      for (const auto& entry : fs::directory_iterator(d)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_directory() && name.rfind("seed_", 0) == 0 &&
            fs::exists(entry.path() / "summary.json")) {
          found.emplace_back(std::stoull(name.substr(5)), entry.path());
        }
      }
    }
    if (found.empty()) {
      err << fmt::format("{}: not a run directory (no summary.json, no seed_* directories)\n",
                         d.string());
      return kExitConfig;
    }
    std::sort(found.begin(), found.end());
    for (auto& f : found) seed_dirs.push_back(f.second);
  }

  std::ostringstream csv;
  csv << kCompareHeader << '\n';
  try {
    for (const auto& d : seed_dirs) {
      const json summary = ReadJson(d / "summary.json");
      if (summary.contains("error")) {
        err << fmt::format("{}: skipped, run failed ({})\n", d.string(),
                           summary["error"].get<std::string>());
        continue;
      }
      const std::string condition = summary.at("condition").get<std::string>();
      const auto seed = summary.at("seed").get<std::uint64_t>();
      csv << fmt::format("{},{},0,{}\n", condition, seed,
                         Num(summary.at("initial_success").get<double>()));
      for (const auto& row : ReadMetrics(d / "metrics.csv")) {
        csv << fmt::format("{},{},{},{}\n", condition, seed, row.iteration, Num(row.success_rate));
      }
    }
  } catch (const std::exception& e) {
    err << "compare failed: " << e.what() << '\n';
    return kExitRuntime;
  }
  out << csv.str();
  return kExitOk;
}

}  // namespace selfalign
