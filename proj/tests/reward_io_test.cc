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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "selfalign/errors.h"
#include "selfalign/reward_io.h"

namespace selfalign {
namespace {

TEST(RewardIoTest, BuiltinSpecsRoundTripThroughJson) {
  for (const auto& name : BuiltinSpecNames()) {
    const RewardSpec spec = BuiltinSpec(name);
    EXPECT_EQ(RewardSpecFromJson(RewardSpecToJson(spec)), spec) << name;
  }
}

TEST(RewardIoTest, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "selfalign_spec_rt.json";
  const RewardSpec spec = BuiltinSpec("open-drawer");
  SaveRewardSpec(spec, path);
  EXPECT_EQ(LoadRewardSpec(path), spec);
  EXPECT_EQ(ResolveRewardSpec(path.string()), spec);
  std::filesystem::remove(path);
}

TEST(RewardIoTest, StructuralProblemsAreItemized) {
  const nlohmann::json doc = {
      {"name", "broken"},
      {"parameters", {{{"name", "w"}, {"default", 1.0}, {"min", 2.0}, {"max", 1.0}}}},
      {"terms", {{{"name", "x_reward"}, {"weight_param", "w"}, {"form", "sideways"},
                  {"feature", "x"}}}}};
  try {
    RewardSpecFromJson(doc);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.issues().size(), 2u);
  }
}

TEST(RewardIoTest, UnknownBuiltinAndMissingFile) {
  EXPECT_THROW(BuiltinSpec("nope"), ConfigError);
  EXPECT_THROW(ResolveRewardSpec("/nonexistent/spec.json"), ConfigError);
}

}  // namespace
}  // namespace selfalign
