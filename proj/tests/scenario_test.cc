/*
 * Copyright 2026 The agsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "agsim/scenario.h"

#include <string>

#include "agsim/error.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace agsim::scenario {
namespace {

using ::testing::HasSubstr;

std::string NoneConfig(const std::string& vehicles_json, const std::string& extra = "") {
  return R"({"scene": ")" + testing::ScenePath("open_field.json").string() +
         R"(", "sim": {"dt": 0.02, "duration": 1.0, "seed": 4}, "vehicles": )" + vehicles_json +
         R"(, "task": {"kind": "none"})" + extra + "}";
}

const char* kTwoVehicles =
    R"([{"id": "ugv1", "type": "car", "position": [0, 0, 0]},
        {"id": "uav1", "type": "multirotor", "position": [0, 5, -10]}])";

std::string ConfigErrorOf(const std::string& text) {
  try {
    ParseScenario(text, testing::DataDir());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ScenarioConfigTest, BundledConfigsParse) {
  for (const char* name : {"mapping.json", "planning.json", "tracking.json", "formation.json"}) {
    SCOPED_TRACE(name);
    const ScenarioConfig config = LoadScenario(testing::ConfigPath(name));
    EXPECT_FALSE(config.vehicles.empty());
    EXPECT_NO_THROW(LoadScenarioScene(config));
  }
}

TEST(ScenarioConfigTest, DuplicateIdNamesTheId) {
  const std::string msg = ConfigErrorOf(NoneConfig(
      R"([{"id": "ugv1", "type": "car", "position": [0, 0, 0]},
          {"id": "ugv1", "type": "car", "position": [4, 0, 0]}])"));
  EXPECT_THAT(msg, HasSubstr("duplicate vehicle id 'ugv1'"));
}

TEST(ScenarioConfigTest, UnknownFieldNamesTheField) {
  EXPECT_THAT(ConfigErrorOf(NoneConfig(kTwoVehicles, R"(, "extra": 1)")), HasSubstr("'extra'"));
  EXPECT_THAT(ConfigErrorOf(NoneConfig(R"([{"id": "a", "type": "car", "position": [0, 0, 0], "colour": "red"}])")),
              HasSubstr("colour"));
}

TEST(ScenarioConfigTest, BadValues) {
  EXPECT_THAT(ConfigErrorOf(NoneConfig(R"([{"id": "a", "type": "boat", "position": [0, 0, 0]}])")), HasSubstr("type"));
  EXPECT_THAT(ConfigErrorOf("{not json"), HasSubstr("not valid JSON"));
  EXPECT_THAT(ConfigErrorOf(NoneConfig(R"({"id": "a"})")), HasSubstr("vehicles"));
  EXPECT_THROW(LoadScenario(testing::DataDir() / "no_such_config.json"), ConfigError);
}

TEST(ScenarioRunTest, NoneTaskWritesTrajectory) {
  const auto dir = testing::ScratchDir("none");
  const RunResult result = RunScenario(ParseScenario(NoneConfig(kTwoVehicles), testing::DataDir()), dir);
  const std::string csv = testing::ReadFile(dir / kTrajectoryFile);
  // 50 stepped ticks for each of two vehicles, plus the header.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 101);
  EXPECT_EQ(result.report["ticks"], 50);
  EXPECT_EQ(result.report["seed"], 4);
  EXPECT_THAT(RenderReports(dir), HasSubstr("Duration"));
}

TEST(ScenarioRunTest, SameSeedSameBytes) {
  const auto a = testing::ScratchDir("a");
  const auto b = testing::ScratchDir("b");
  const ScenarioConfig config = ParseScenario(NoneConfig(kTwoVehicles), testing::DataDir());
  RunScenario(config, a);
  RunScenario(config, b);
  EXPECT_EQ(testing::ReadFile(a / kTrajectoryFile), testing::ReadFile(b / kTrajectoryFile));
}

TEST(ScenarioRunTest, EmptyDirectoryListsExpectedReports) {
  const auto dir = testing::ScratchDir("empty");
  try {
    RenderReports(dir);
    FAIL() << "expected MissingArtifact";
  } catch (const MissingArtifact& e) {
    EXPECT_THAT(e.what(), HasSubstr(ReportFileName(TaskKind::kNone)));
    EXPECT_THAT(e.what(), HasSubstr(ReportFileName(TaskKind::kMapping)));
  }
}

TEST(ScenarioRunTest, FormationIsSynchronous) {
  ScenarioConfig config = LoadScenario(testing::ConfigPath("formation.json"));
  config.sim.duration = 4.0;
  const RunResult result = RunScenario(config, testing::ScratchDir("formation"));
  EXPECT_EQ(result.report["sync_violations"], 0);
  EXPECT_GT(result.report["lidar_rate_hz"].get<double>(), 0.0);
}

}  // namespace
}  // namespace agsim::scenario
