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

#include <cmath>

#include "sphereplan/metrics.hpp"

namespace sphereplan
{
namespace
{

Agent agent(Vec2 start, Vec2 goal)
{
  Agent a;
  a.start = start;
  a.goal = goal;
  return a;
}

TEST(LowerBounds, Distance)
{
  const std::vector<Agent> one{agent({0, 0}, {20, 0})};
  EXPECT_DOUBLE_EQ(distance_lower_bound(one), 20.0);
  const std::vector<Agent> two{agent({0, 10}, {20, 10}), agent({10, 0}, {10, 20})};
  EXPECT_DOUBLE_EQ(distance_lower_bound(two), 40.0);
  const std::vector<Agent> still{agent({3, 3}, {3, 3})};
  EXPECT_DOUBLE_EQ(distance_lower_bound(still), 0.0);
}

TEST(LowerBounds, Makespan)
{
  const std::vector<Agent> one{agent({0, 0}, {20, 0})};
  EXPECT_NEAR(makespan_lower_bound(one), 3.6514837167011076, 1e-12);
  const std::vector<Agent> still{agent({3, 3}, {3, 3})};
  EXPECT_DOUBLE_EQ(makespan_lower_bound(still), 0.0);
  const std::vector<Agent> two{agent({0, 0}, {20, 0}), agent({0, 0}, {20, 20})};
  EXPECT_DOUBLE_EQ(makespan_lower_bound(two), std::sqrt(2.0 * std::hypot(20.0, 20.0) / 3.0));
}

TEST(Suboptimality, OptimumIsOne)
{
  const Ratios r = suboptimality({40.0, 5.0}, {40.0, 5.0});
  EXPECT_EQ(*r.distance, 1.0);
  EXPECT_EQ(*r.makespan, 1.0);
  EXPECT_EQ(*r.overall, 1.0);
}

TEST(Suboptimality, OverallIsTheMean)
{
  EXPECT_NEAR(*suboptimality({1.059, 1.825}, {1.0, 1.0}).overall, 1.442, 1e-3);
  EXPECT_NEAR(*suboptimality({1.561, 1.657}, {1.0, 1.0}).overall, 1.609, 1e-3);
  EXPECT_NEAR(*suboptimality({1.146, 2.281}, {1.0, 1.0}).overall, 1.7135, 1e-3);
}

TEST(Suboptimality, ZeroBoundIsNotApplicable)
{
  const Ratios r = suboptimality({0.0, 0.0}, {0.0, 0.0});
  EXPECT_FALSE(r.distance.has_value());
  EXPECT_FALSE(r.makespan.has_value());
  EXPECT_FALSE(r.overall.has_value());
}

TEST(MeasuredMetrics, StraightAndDeviated)
{
  PlanResult r;
  r.status = PlanStatus::converged;
  Path a;
  a.id = PathId{1};
  a.append({0, 0, 0}, 4.0);
  a.append({20, 0, 5}, 4.0);
  Path b;
  b.id = PathId{2};
  b.append({0, 10, 0}, 4.0);
  b.append({10, 14, 3}, 4.0);
  b.append({20, 10, 7}, 4.0);
  r.paths = {a, b};
  const Measured m = measured_metrics(r);
  EXPECT_DOUBLE_EQ(m.makespan, 7.0);
  EXPECT_GT(m.distance, 40.0);
  EXPECT_DOUBLE_EQ(m.distance, 20.0 + 2.0 * std::hypot(10.0, 4.0));
  r.status = PlanStatus::infeasible;
  EXPECT_THROW(measured_metrics(r), std::invalid_argument);
}

ScenarioSpec small(std::string name, Vec2 obstacle = {-100, -100})
{
  ScenarioSpec s;
  s.name = std::move(name);
  s.config.tau = 8.0;
  s.agents = {agent({0, 10}, {20, 10}), agent({10, 0}, {10, 20})};
  s.agents[0].priority = 100.0;
  if (obstacle.x > -100) {
    s.scenario_class = ScenarioClass::static_obstacles;
    s.static_obstacles = {{"o1", obstacle}, {"o2", obstacle}};
  }
  return s;
}

TEST(RunSuite, EmptyAndOrdered)
{
  EXPECT_TRUE(run_suite({}, 1).scenarios.empty());
  const std::vector<ScenarioSpec> specs{small("one"), small("bad", {5, 5}), small("two")};
  for (bool parallel : {false, true}) {
    const MetricsReport rep = run_suite(specs, 2, parallel);
    ASSERT_EQ(rep.scenarios.size(), 3u);
    EXPECT_EQ(rep.trials, 2u);
    EXPECT_EQ(rep.scenarios[0].name, "one");
    EXPECT_EQ(rep.scenarios[1].name, "bad");
    EXPECT_EQ(rep.scenarios[1].status, PlanStatus::infeasible);
    EXPECT_FALSE(rep.scenarios[1].measured.has_value());
    EXPECT_EQ(rep.scenarios[2].status, PlanStatus::converged);
    EXPECT_GE(*rep.scenarios[2].ratios.distance, 1.0);
    EXPECT_GE(*rep.scenarios[2].ratios.makespan, 1.0);
    EXPECT_FALSE(rep.all_converged());
  }
  EXPECT_THROW(run_suite(specs, 0), std::invalid_argument);
}

}  // namespace
}  // namespace sphereplan
