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

#include <sstream>

#include "sphereplan/io.hpp"

namespace sphereplan
{
namespace
{

PlanResult crossing()
{
  PlanRequest req;
  req.config.tau = 8.0;
  Agent a;
  a.name = "a1";
  a.start = {0, 10};
  a.goal = {20, 10};
  a.priority = 100.0;
  Agent b;
  b.name = "a2";
  b.start = {10, 0};
  b.goal = {10, 20};
  req.agents = {a, b};
  req.dynamic_obstacles.push_back({"p1", PathKind::dynamic_obstacle, {{0.0, {-10, -10}}, {12.0, {-10, 30}}}});
  return plan(req);
}

std::string text_of(const TrajectorySet & set)
{
  std::ostringstream os;
  write_trajectories(os, set);
  return os.str();
}

TEST(Exact, ShortestRoundTrip)
{
  EXPECT_EQ(detail::exact(0.1), "0.1");
  EXPECT_EQ(detail::exact(1.0), "1");
  for (double v : {1.0 / 3.0, 4.781088913245535, -2.5e-7, 123456.789}) EXPECT_EQ(std::stod(detail::exact(v)), v);
}

TEST(Trajectories, RoundTripIsLossless)
{
  const PlanResult r = crossing();
  ASSERT_EQ(r.status, PlanStatus::converged) << r.diagnostics;
  const TrajectorySet set = trajectory_set(r, "crossing");
  ASSERT_EQ(set.paths.size(), 3u);
  const std::string text = text_of(set);
  std::istringstream in(text);
  const TrajectorySet back = read_trajectories(in);
  EXPECT_EQ(back.scenario, "crossing");
  EXPECT_EQ(back.tau, 8.0);
  EXPECT_EQ(back.working_radius, r.working_radius);
  ASSERT_EQ(back.paths.size(), set.paths.size());
  for (std::size_t i = 0; i < set.paths.size(); ++i) {
    EXPECT_EQ(back.paths[i].kind, set.paths[i].kind);
    EXPECT_EQ(back.paths[i].name, set.paths[i].name);
    ASSERT_EQ(back.paths[i].size(), set.paths[i].size());
    for (std::size_t k = 0; k < set.paths[i].size(); ++k) {
      EXPECT_EQ(back.paths[i].spheres[k].center.t, set.paths[i].spheres[k].center.t);
      EXPECT_EQ(back.paths[i].spheres[k].spatially_immutable, set.paths[i].spheres[k].spatially_immutable);
    }
  }
  EXPECT_EQ(text_of(back), text);
  EXPECT_TRUE(check_trajectories(back).clean());
}

TEST(Trajectories, OverlapIsReported)
{
  const std::string text =
    "# tau 1\n# radius 3.5\n# working_radius 4.78\n"
    "# path 1 a agent accel 3 priority 1 pinned -\n"
    "# path 2 b agent accel 3 priority 1 pinned -\n"
    "path,index,x,y,t,wx,wy\n"
    "1,0,0,0,0,0,0\n1,1,6,0,2,6,0\n"
    "2,0,0,1,0,0,0\n2,1,6,1,2,6,0\n";
  std::istringstream in(text);
  const TrajectoryCheck c = check_trajectories(read_trajectories(in));
  EXPECT_FALSE(c.collisions.empty());
  EXPECT_TRUE(c.chain.empty());
  EXPECT_EQ(c.collisions.front().t, 0.0);
}

TEST(Trajectories, KinematicsViolationIsFlagged)
{
  const std::string text =
    "# tau 1\n# radius 3.5\n# working_radius 4.78\n"
    "# path 1 a agent accel 3 priority 1 pinned -\n"
    "path,index,x,y,t,wx,wy\n"
    "1,0,0,0,0,0,0\n1,1,6,0,1,6,0\n";
  std::istringstream in(text);
  const TrajectoryCheck c = check_trajectories(read_trajectories(in));
  ASSERT_EQ(c.chain.size(), 1u);
  EXPECT_EQ(c.chain[0].second.kind, ViolationKind::kinematics);
  EXPECT_EQ(c.chain[0].second.first, 0u);
  EXPECT_EQ(c.chain[0].second.second, 1u);
  EXPECT_DOUBLE_EQ(c.chain[0].second.limit, 2.0);
}

TEST(Trajectories, MalformedInput)
{
  auto fails = [](const std::string & text, const std::string & needle) {
    std::istringstream in(text);
    try {
      read_trajectories(in, "f.csv");
    } catch (const TrajectoryError & e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  EXPECT_TRUE(fails("", "missing header"));
  EXPECT_TRUE(fails("# tau 1\n# working_radius 1\nx,y\n", "f.csv:3"));
  EXPECT_TRUE(fails("# tau 1\n# working_radius 1\npath,index,x,y,t,wx,wy\n1,0,0,0,0,0,0\n", "no metadata"));
  EXPECT_TRUE(fails("# tau 1\n# working_radius 1\n# path 1 a agent accel 3 priority 1 pinned -\n"
                    "path,index,x,y,t,wx,wy\n1,0,zero,0,0,0,0\n",
                    "bad number"));
  EXPECT_TRUE(fails("# tau 1\n# working_radius 1\n# path 1 a boat accel 3 priority 1 pinned -\n", "path kind"));
  EXPECT_TRUE(fails("# path 1 a agent accel 3 priority 1 pinned -\npath,index,x,y,t,wx,wy\n", "working_radius"));
}

TEST(Track, SampledAtRate)
{
  const PlanResult r = crossing();
  std::ostringstream os;
  write_track(os, trajectory_set(r, "crossing"));
  const std::string out = os.str();
  EXPECT_EQ(out.rfind("path,t,x,y\n", 0), 0u);
  EXPECT_NE(out.find("\n1,0.01,"), std::string::npos);
}

TEST(Report, TableAndJson)
{
  MetricsReport rep;
  rep.trials = 3;
  ScenarioReport s;
  s.name = "F1";
  s.status = PlanStatus::converged;
  s.agents = 2;
  s.measured = Measured{44.0, 6.0};
  s.bounds = {40.0, 4.0};
  s.ratios = suboptimality(*s.measured, s.bounds);
  rep.scenarios.push_back(s);
  std::ostringstream os;
  write_report_table(os, rep);
  EXPECT_NE(os.str().find("F1"), std::string::npos);
  EXPECT_NE(os.str().find("1.100"), std::string::npos);
  const nlohmann::json j = report_json(rep);
  EXPECT_EQ(j["trials"], 3);
  EXPECT_EQ(j["scenarios"][0]["name"], "F1");
  EXPECT_DOUBLE_EQ(j["scenarios"][0]["makespan_ratio"].get<double>(), 1.5);
}

TEST(Svg, BothViewsRender)
{
  const TrajectorySet set = trajectory_set(crossing(), "crossing");
  std::ostringstream top;
  write_svg_topdown(top, set);
  std::ostringstream tri;
  write_svg_triptych(tri, set);
  EXPECT_EQ(top.str().rfind("<svg", 0), 0u);
  EXPECT_NE(tri.str().find("</svg>"), std::string::npos);
  EXPECT_NE(tri.str().find("clipPath"), std::string::npos);
}

}  // namespace
}  // namespace sphereplan
