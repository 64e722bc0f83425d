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

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "selfalign/commands.h"
#include "selfalign/envs.h"
#include "selfalign/errors.h"
#include "selfalign/reward_io.h"
#include "selfalign/run_config.h"
#include "selfalign/specgen.h"

namespace {

using selfalign::kExitConfig;
using selfalign::kExitOk;
using selfalign::kExitRuntime;

struct RunFlags {
  std::string config_path;
  std::string seeds;
  std::string oracle;
  std::string out;
  std::optional<int> max_iters;
  std::string env;
};

int Run(const RunFlags& flags) {
  selfalign::RunConfig config;
  try {
    if (!flags.config_path.empty()) {
      config = selfalign::LoadRunConfig(flags.config_path);
    } else if (flags.env.empty()) {
      throw selfalign::ConfigError("either --config or --env is required");
    }
    if (!flags.env.empty()) config.env = flags.env;
    if (!flags.seeds.empty()) config.seeds = selfalign::ParseSeedList(flags.seeds);
    if (!flags.out.empty()) config.out = flags.out;
    if (flags.max_iters) config.alignment.max_iterations = *flags.max_iters;
    if (flags.oracle == "llm") {
      config.oracle.backend = selfalign::OracleBackend::kLlm;
    } else if (flags.oracle == "scripted") {
      config.oracle.backend = selfalign::OracleBackend::kScripted;
    }
  } catch (const selfalign::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return selfalign::CmdRun(config, std::cout, std::cerr);
}

int Propose(const std::string& env_name, const std::string& task) {
  try {
    const auto env = selfalign::MakeEnv(env_name);
    const std::string description = task.empty() ? env->spec().task_description : task;
    std::cout << selfalign::RenderProposalPrompt(env->spec(), description) << '\n';
    return kExitOk;
  } catch (const selfalign::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int CheckProposal(const std::string& env_name, const std::string& path,
                  const std::string& save) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << '\n';
    return kExitConfig;
  }
  const std::string reply((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    const auto env = selfalign::MakeEnv(env_name);
    const auto names = env->spec().FeatureNames();
    const selfalign::RewardSpec spec = selfalign::ParseProposal(reply, names);
    std::cout << spec.name() << ": " << spec.terms().size() << " terms, "
              << spec.defaults().size() << " parameters\n";
    if (!save.empty()) selfalign::SaveRewardSpec(spec, save);
    return kExitOk;
  } catch (const selfalign::ValidationError& e) {
    std::cerr << "invalid proposal:\n";
    for (const auto& issue : e.issues()) std::cerr << "  - " << issue << '\n';
    return kExitRuntime;
  } catch (const selfalign::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward self-alignment experiments"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "run experiments described by a config file");
  run->add_option("--config", run_flags.config_path, "JSON run config")->check(CLI::ExistingFile);
  run->add_option("--seed", run_flags.seeds, "seed list, e.g. 1,2,3 or 1-5");
  run->add_option("--oracle", run_flags.oracle, "oracle backend")
      ->check(CLI::IsMember({"scripted", "llm"}));
  run->add_option("--out", run_flags.out, "output directory");
  run->add_option("--max-iters", run_flags.max_iters, "outer iteration budget");
  run->add_option("--env", run_flags.env, "environment name");

  std::string replay_dir;
  auto* replay = app.add_subcommand("replay", "check a run directory against its logs");
  replay->add_option("dir", replay_dir, "seed run directory")->required();

  std::vector<std::string> compare_dirs;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "merge success-rate curves into one CSV");
  compare->add_option("dirs", compare_dirs, "run directories");
  compare->add_option("--csv", compare_out, "write the CSV here instead of stdout");

  std::string env_name, task;
  auto* propose = app.add_subcommand("propose", "print the reward proposal prompt");
  propose->add_option("--env", env_name, "environment name")->required();
  propose->add_option("--task", task, "task description");

  std::string proposal_env, proposal_path, proposal_save;
  auto* check = app.add_subcommand("check-proposal", "validate a proposal reply");
  check->add_option("--env", proposal_env, "environment name")->required();
  check->add_option("reply", proposal_path, "file holding the reply")->required();
  check->add_option("--save", proposal_save, "write the parsed spec as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*run) return Run(run_flags);
  if (*replay) return selfalign::CmdReplay(replay_dir, std::cout, std::cerr);
  if (*compare) {
    std::vector<std::filesystem::path> dirs(compare_dirs.begin(), compare_dirs.end());
    if (compare_out.empty()) return selfalign::CmdCompare(dirs, std::cout, std::cerr);
    std::ofstream out(compare_out);
    if (!out) {
      std::cerr << "cannot write " << compare_out << '\n';
      return kExitRuntime;
    }
    return selfalign::CmdCompare(dirs, out, std::cerr);
  }
  if (*propose) return Propose(env_name, task);
  if (*check) return CheckProposal(proposal_env, proposal_path, proposal_save);
  return kExitConfig;
}
