// Copyright 2026 The sphereplan Authors
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
#include <string>

#include "sphereplan/scenario.hpp"

namespace sphereplan
{
namespace
{

const char * kMinimal = R"(format: 1
name: t1
class: F
agents:
  - {name: a1, start: [0, 10], goal: [20, 10], priority: 100}
  - {start: [10, 0], goal: [10, 20]}
)";

std::string message_of(const std::string & text)
{
  try {
    parse_scenario(text, "case.yaml");
  } catch (const ScenarioError & e) {
    return e.what();
  }
  return "";
}

TEST(ParseScenario, Minimal)
{
  const ScenarioSpec s = parse_scenario(kMinimal);
  EXPECT_EQ(s.name, "t1");
  EXPECT_EQ(s.scenario_class, ScenarioClass::obstacle_free);
  ASSERT_EQ(s.agents.size(), 2u);
  EXPECT_EQ(s.agents[0].priority, 100.0);
  EXPECT_EQ(s.agents[1].name, "a2");
  EXPECT_EQ(s.agents[1].radius, 3.5);
  EXPECT_EQ(s.agents[1].accel_bound, 3.0);
  EXPECT_EQ(s.agents[1].rigidity, 10.0);
  EXPECT_EQ(s.width, 20.0);
  EXPECT_DOUBLE_EQ(s.config.lambda, inflation_factor());
  EXPECT_EQ(s.config.tau, 1.0);
}

TEST(ParseScenario, FullSchema)
{
  const ScenarioSpec s = parse_scenario(R"(format: 1
name: full
class: D
description: "everything set"
field: {width: 30, height: 25}
config:
  tau: 4
  lambda: 1.5
  bias_angle: 0.2
  step_margin: 0.1
  horizon_factor: 2
  iteration_cap_factor: 5
  rigidity: 7
  budget: {max_depth: 9, max_solutions: 3, max_nodes: 500}
agents:
  - name: a1
    start: [0, 0]
    goal: [30, 25]
    radius: 3.5
    accel_bound: 2
    priority: 5
    rigidity: 4
    initial_velocity: [1, 0]
    lane_constrained: [[1, 2]]
  - {name: a2, start: [30, 0], goal: [0, 25]}
dynamic_obstacles:
  - name: p1
    kind: pedestrian
    trajectory:
      - [0, 5, 5]
      - [10, 25, 5]
)");
  EXPECT_EQ(s.scenario_class, ScenarioClass::dynamic_obstacles);
  EXPECT_EQ(s.description, "everything set");
  EXPECT_EQ(s.height, 25.0);
  EXPECT_EQ(s.config.tau, 4.0);
  EXPECT_EQ(s.config.lambda, 1.5);
  EXPECT_EQ(s.config.search.bias_angle, 0.2);
  EXPECT_EQ(s.config.search.budget.max_nodes, 500u);
  EXPECT_EQ(s.config.search.budget.max_depth, 9u);
  EXPECT_EQ(s.agents[0].rigidity, 4.0);
  EXPECT_EQ(s.agents[1].rigidity, 7.0);
  EXPECT_EQ(s.agents[0].initial_velocity.x, 1.0);
  ASSERT_EQ(s.agents[0].lane_constrained.size(), 1u);
  EXPECT_EQ(s.agents[0].lane_constrained[0].last, 2u);
  ASSERT_EQ(s.dynamic_obstacles.size(), 1u);
  EXPECT_EQ(s.dynamic_obstacles[0].trajectory[1].position.x, 25.0);
  const PlanRequest r = s.to_request();
  EXPECT_EQ(r.field.max_x, 30.0);
  EXPECT_NO_THROW(r.check());
}

TEST(ParseScenario, DiagnosticsNameTheField)
{
  EXPECT_NE(message_of("format: 1\nname: x\nclass: F\nagents:\n  - {start: [0, 0], goal: [5, oops]}\n")
              .find("agents[0].goal"),
            std::string::npos);
  EXPECT_NE(message_of("format: 1\nname: x\nclass: F\n").find("agents"), std::string::npos);
  EXPECT_NE(message_of("format: 2\nname: x\nclass: F\nagents: []\n").find("format"), std::string::npos);
  EXPECT_NE(message_of(std::string(kMinimal) + "colour: red\n").find("colour"), std::string::npos);
  EXPECT_NE(message_of("format: 1\nname: x\nclass: Q\nagents: []\n").find("class"), std::string::npos);
  EXPECT_NE(message_of("format: 1\nname: x\nclass: F\nagents:\n  - {start: [0, 0], goal: [50, 0]}\n")
              .find("outside the field"),
            std::string::npos);
  EXPECT_NE(message_of("format: 1\nname: x\nclass: F\nconfig: {lambda: 0.5}\nagents: []\n").find("config.lambda"),
            std::string::npos);
  EXPECT_NE(message_of("format: 1\nname: [unclosed\n").find("case.yaml:"), std::string::npos);
}

TEST(ParseScenario, LineNumbersInDiagnostics)
{
  const std::string msg = message_of("format: 1\nname: x\nclass: F\nagents:\n  - {start: [0, 0], goal: [5, oops]}\n");
  EXPECT_NE(msg.find("case.yaml:5"), std::string::npos) << msg;
}

TEST(ParseScenario, ClassInvariants)
{
  EXPECT_NE(message_of(std::string(kMinimal) + "static_obstacles:\n  - {position: [5, 5]}\n").find("class F"),
            std::string::npos);
  EXPECT_NE(message_of("format: 1\nname: x\nclass: S\nagents:\n  - {start: [0, 0], goal: [5, 0]}\n").find("class S"),
            std::string::npos);
  EXPECT_NE(message_of("format: 1\nname: x\nclass: N\nagents:\n  - {start: [0, 0], goal: [5, 0]}\n").find("class D/N"),
            std::string::npos);
}

TEST(ParseScenario, TrajectoryTimesMustIncrease)
{
  const std::string text = R"(format: 1
name: x
class: D
agents:
  - {start: [0, 0], goal: [5, 0]}
dynamic_obstacles:
  - {kind: dynamic, trajectory: [[0, 1, 1], [0, 2, 2]]}
)";
  EXPECT_NE(message_of(text).find("times must increase"), std::string::npos);
}

TEST(LoadScenario, MissingFile)
{
  EXPECT_THROW(load_scenario("/nonexistent/none.yaml"), ScenarioError);
}

TEST(LoadScenario, ShippedSuiteParses)
{
  std::size_t count = 0;
  for (const auto & e : std::filesystem::directory_iterator(SPHEREPLAN_SCENARIO_DIR)) {
    if (e.path().extension() != ".yaml") continue;
    const ScenarioSpec s = load_scenario(e.path());
    EXPECT_EQ(s.name, e.path().stem().string());
    EXPECT_EQ(std::string(1, class_letter(s.scenario_class)), s.name.substr(0, 1));
    EXPECT_GE(s.agents.size(), 2u);
    EXPECT_LE(s.agents.size(), 4u);
    EXPECT_LE(s.static_obstacles.size() + s.dynamic_obstacles.size(), 5u);
    ++count;
  }
  EXPECT_EQ(count, 12u);
}

}  // namespace
}  // namespace sphereplan
