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

#ifndef SPHEREPLAN__SCENARIO_HPP_
#define SPHEREPLAN__SCENARIO_HPP_

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sphereplan/planner.hpp"

namespace sphereplan
{

/// Malformed or inconsistent scenario document. The message names the source,
/// line and offending field.
class ScenarioError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioClass { obstacle_free, static_obstacles, dynamic_obstacles, non_connected };

inline char class_letter(ScenarioClass c)
{
  switch (c) {
    case ScenarioClass::obstacle_free:
      return 'F';
    case ScenarioClass::static_obstacles:
      return 'S';
    case ScenarioClass::dynamic_obstacles:
      return 'D';
    case ScenarioClass::non_connected:
      return 'N';
  }
  return 'F';
}

struct ScenarioSpec
{
  std::string name;
  ScenarioClass scenario_class{ScenarioClass::obstacle_free};
  std::string description;
  double width{20.0};
  double height{20.0};
  std::vector<Agent> agents;
  std::vector<StaticObstacle> static_obstacles;
  std::vector<DynamicObstacle> dynamic_obstacles;
  PlanConfig config;

  void check() const
  {
    auto fail = [&](const std::string & why) { throw ScenarioError("scenario '" + name + "': " + why); };
    if (!(width > 0.0 && height > 0.0)) fail("field size must be positive");
    if (agents.empty()) fail("at least one agent is required");
    switch (scenario_class) {
      case ScenarioClass::obstacle_free:
        if (!static_obstacles.empty() || !dynamic_obstacles.empty()) fail("class F admits no obstacles");
        break;
      case ScenarioClass::static_obstacles:
        if (static_obstacles.empty()) fail("class S requires a static obstacle");
        break;
      case ScenarioClass::dynamic_obstacles:
      case ScenarioClass::non_connected:
        if (dynamic_obstacles.empty()) fail("class D/N requires a dynamic obstacle or non-connected vehicle");
        break;
    }
  }

  PlanRequest to_request() const
  {
    PlanRequest req;
    req.agents = agents;
    req.static_obstacles = static_obstacles;
    req.dynamic_obstacles = dynamic_obstacles;
    req.field = {0.0, 0.0, width, height};
    req.config = config;
    return req;
  }
};

namespace detail
{

class YamlReader
{
public:
  explicit YamlReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node & node, const std::string & field, const std::string & why) const
  {
    std::ostringstream msg;
    msg << source_;
    if (node.IsDefined() && node.Mark().line >= 0) msg << ":" << node.Mark().line + 1;
    msg << ": field '" << field << "': " << why;
    throw ScenarioError(msg.str());
  }

  double number(const YAML::Node & node, const std::string & field) const
  {
    if (!node.IsScalar()) fail(node, field, "expected a number");
    try {
      return node.as<double>();
    } catch (const YAML::Exception &) {
      fail(node, field, "expected a number, got '" + node.Scalar() + "'");
    }
  }

  double number_or(const YAML::Node & parent, const char * key, const std::string & field, double fallback) const
  {
    const YAML::Node n = parent[key];
    return n ? number(n, field) : fallback;
  }

  std::string text(const YAML::Node & node, const std::string & field) const
  {
    if (!node.IsScalar()) fail(node, field, "expected a string");
    return node.Scalar();
  }

  std::size_t count(const YAML::Node & node, const std::string & field) const
  {
    const double v = number(node, field);
    if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      fail(node, field, "expected a non-negative integer");
    }
    return static_cast<std::size_t>(v);
  }

  Vec2 point(const YAML::Node & node, const std::string & field) const
  {
    if (!node.IsSequence() || node.size() != 2) fail(node, field, "expected [x, y]");
    return {number(node[0], field + "[0]"), number(node[1], field + "[1]")};
  }

  YAML::Node require(const YAML::Node & parent, const char * key, const std::string & field) const
  {
    YAML::Node n = parent[key];
    if (!n) fail(parent, field, "missing");
    return n;
  }

private:
  std::string source_;
};

}  // namespace detail

/**
 * Parses a scenario document (format 1). `source` is used in diagnostics only.
 * Unknown top-level keys are rejected so that typos surface as errors.
 */
inline ScenarioSpec parse_scenario(const std::string & text, const std::string & source = "<scenario>")
{
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException & e) {
    throw ScenarioError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  detail::YamlReader rd(source);
  if (!root.IsMap()) rd.fail(root, "<root>", "expected a mapping");

  static const char * kKnown[] = {"format", "name", "class", "description", "field", "config",
                                  "agents", "static_obstacles", "dynamic_obstacles"};
  for (const auto & kv : root) {
    const std::string key = kv.first.Scalar();
    if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
      rd.fail(kv.first, key, "unknown field");
    }
  }

  const YAML::Node format = rd.require(root, "format", "format");
  if (rd.number(format, "format") != 1.0) rd.fail(format, "format", "unsupported version (expected 1)");

  ScenarioSpec spec;
  spec.name = rd.text(rd.require(root, "name", "name"), "name");
  const YAML::Node cls = rd.require(root, "class", "class");
  const std::string c = rd.text(cls, "class");
  if (c == "F") {
    spec.scenario_class = ScenarioClass::obstacle_free;
  } else if (c == "S") {
    spec.scenario_class = ScenarioClass::static_obstacles;
  } else if (c == "D") {
    spec.scenario_class = ScenarioClass::dynamic_obstacles;
  } else if (c == "N") {
    spec.scenario_class = ScenarioClass::non_connected;
  } else {
    rd.fail(cls, "class", "expected one of F, S, D, N");
  }
  if (root["description"]) spec.description = rd.text(root["description"], "description");

  if (const YAML::Node field = root["field"]) {
    spec.width = rd.number_or(field, "width", "field.width", spec.width);
    spec.height = rd.number_or(field, "height", "field.height", spec.height);
  }

  PlanConfig & cfg = spec.config;
  double default_rigidity = 10.0;
  if (const YAML::Node n = root["config"]) {
    cfg.tau = rd.number_or(n, "tau", "config.tau", cfg.tau);
    cfg.lambda = rd.number_or(n, "lambda", "config.lambda", cfg.lambda);
    cfg.search.bias_angle = rd.number_or(n, "bias_angle", "config.bias_angle", cfg.search.bias_angle);
    cfg.step_margin = rd.number_or(n, "step_margin", "config.step_margin", cfg.step_margin);
    cfg.horizon_factor = rd.number_or(n, "horizon_factor", "config.horizon_factor", cfg.horizon_factor);
    cfg.iteration_cap_factor =
      rd.number_or(n, "iteration_cap_factor", "config.iteration_cap_factor", cfg.iteration_cap_factor);
    default_rigidity = rd.number_or(n, "rigidity", "config.rigidity", default_rigidity);
    if (const YAML::Node b = n["budget"]) {
      if (b["max_depth"]) cfg.search.budget.max_depth = rd.count(b["max_depth"], "config.budget.max_depth");
      if (b["max_solutions"]) {
        cfg.search.budget.max_solutions = rd.count(b["max_solutions"], "config.budget.max_solutions");
      }
      if (b["max_nodes"]) cfg.search.budget.max_nodes = rd.count(b["max_nodes"], "config.budget.max_nodes");
    }
    if (!(cfg.tau > 0.0)) rd.fail(n["tau"], "config.tau", "must be positive");
    if (!(cfg.lambda >= 1.0)) rd.fail(n["lambda"], "config.lambda", "must be at least 1");
  }

  const YAML::Node agents = rd.require(root, "agents", "agents");
  if (!agents.IsSequence()) rd.fail(agents, "agents", "expected a list");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const YAML::Node a = agents[i];
    const std::string f = "agents[" + std::to_string(i) + "]";
    Agent agent;
    agent.name = a["name"] ? rd.text(a["name"], f + ".name") : "a" + std::to_string(i + 1);
    agent.start = rd.point(rd.require(a, "start", f + ".start"), f + ".start");
    agent.goal = rd.point(rd.require(a, "goal", f + ".goal"), f + ".goal");
    agent.radius = rd.number_or(a, "radius", f + ".radius", agent.radius);
    agent.accel_bound = rd.number_or(a, "accel_bound", f + ".accel_bound", agent.accel_bound);
    agent.priority = rd.number_or(a, "priority", f + ".priority", agent.priority);
    agent.rigidity = rd.number_or(a, "rigidity", f + ".rigidity", default_rigidity);
    if (a["initial_velocity"]) agent.initial_velocity = rd.point(a["initial_velocity"], f + ".initial_velocity");
    if (const YAML::Node lanes = a["lane_constrained"]) {
      if (!lanes.IsSequence()) rd.fail(lanes, f + ".lane_constrained", "expected a list of [first, last]");
      for (std::size_t k = 0; k < lanes.size(); ++k) {
        const std::string lf = f + ".lane_constrained[" + std::to_string(k) + "]";
        if (!lanes[k].IsSequence() || lanes[k].size() != 2) rd.fail(lanes[k], lf, "expected [first, last]");
        IndexRange range{rd.count(lanes[k][0], lf), rd.count(lanes[k][1], lf)};
        if (range.first > range.last) rd.fail(lanes[k], lf, "first must not exceed last");
        agent.lane_constrained.push_back(range);
      }
    }
    try {
      agent.check();
    } catch (const PathError & e) {
      rd.fail(a, f, e.what());
    }
    if (agent.start.x < 0 || agent.start.y < 0 || agent.start.x > spec.width || agent.start.y > spec.height) {
      rd.fail(a["start"], f + ".start", "outside the field");
    }
    if (agent.goal.x < 0 || agent.goal.y < 0 || agent.goal.x > spec.width || agent.goal.y > spec.height) {
      rd.fail(a["goal"], f + ".goal", "outside the field");
    }
    spec.agents.push_back(std::move(agent));
  }

  if (const YAML::Node obs = root["static_obstacles"]) {
    if (!obs.IsSequence()) rd.fail(obs, "static_obstacles", "expected a list");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string f = "static_obstacles[" + std::to_string(i) + "]";
      StaticObstacle o;
      o.name = obs[i]["name"] ? rd.text(obs[i]["name"], f + ".name") : "o" + std::to_string(i + 1);
      o.position = rd.point(rd.require(obs[i], "position", f + ".position"), f + ".position");
      spec.static_obstacles.push_back(std::move(o));
    }
  }

  if (const YAML::Node dyn = root["dynamic_obstacles"]) {
    if (!dyn.IsSequence()) rd.fail(dyn, "dynamic_obstacles", "expected a list");
    for (std::size_t i = 0; i < dyn.size(); ++i) {
      const std::string f = "dynamic_obstacles[" + std::to_string(i) + "]";
      DynamicObstacle o;
      o.name = dyn[i]["name"] ? rd.text(dyn[i]["name"], f + ".name") : "d" + std::to_string(i + 1);
      if (dyn[i]["kind"]) {
        const auto kind = path_kind_from_string(rd.text(dyn[i]["kind"], f + ".kind"));
        if (!kind || *kind == PathKind::agent || *kind == PathKind::static_obstacle) {
          rd.fail(dyn[i]["kind"], f + ".kind", "expected dynamic, pedestrian or non_connected");
        }
        o.kind = *kind;
      }
      const YAML::Node traj = rd.require(dyn[i], "trajectory", f + ".trajectory");
      if (!traj.IsSequence() || traj.size() == 0) rd.fail(traj, f + ".trajectory", "expected a list of [t, x, y]");
      for (std::size_t k = 0; k < traj.size(); ++k) {
        const std::string tf = f + ".trajectory[" + std::to_string(k) + "]";
        if (!traj[k].IsSequence() || traj[k].size() != 3) rd.fail(traj[k], tf, "expected [t, x, y]");
        TimedPoint tp{rd.number(traj[k][0], tf), {rd.number(traj[k][1], tf), rd.number(traj[k][2], tf)}};
        if (!o.trajectory.empty() && !(tp.t > o.trajectory.back().t)) rd.fail(traj[k], tf, "times must increase");
        o.trajectory.push_back(tp);
      }
      spec.dynamic_obstacles.push_back(std::move(o));
    }
  }

  try {
    spec.check();
  } catch (const ScenarioError & e) {
    throw ScenarioError(source + ": " + e.what());
  }
  return spec;
}

inline ScenarioSpec load_scenario(const std::filesystem::path & file)
{
  std::ifstream in(file);
  if (!in) throw ScenarioError(file.string() + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), file.string());
}

}  // namespace sphereplan

#endif  // SPHEREPLAN__SCENARIO_HPP_
