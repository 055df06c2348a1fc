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

#ifndef SPHEREPLAN__PLANNER_HPP_
#define SPHEREPLAN__PLANNER_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sphereplan/conflict_search.hpp"
#include "sphereplan/geometry.hpp"
#include "sphereplan/path.hpp"
#include "sphereplan/stg_index.hpp"

namespace sphereplan
{

class RequestError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct StaticObstacle
{
  std::string name;
  Vec2 position;
};

struct TimedPoint
{
  double t{0.0};
  Vec2 position;
};

/// Dynamic obstacle or non-connected vehicle with a known trajectory.
struct DynamicObstacle
{
  std::string name;
  PathKind kind{PathKind::dynamic_obstacle};
  std::vector<TimedPoint> trajectory;
};

struct FieldBounds
{
  double min_x{0.0};
  double min_y{0.0};
  double max_x{20.0};
  double max_y{20.0};

  bool contains(Vec2 p) const { return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y; }
};

struct PlanConfig
{
  double tau{1.0};
  double lambda{inflation_factor()};
  SearchConfig search;
  /// Uploaded neighbors are spaced at 2R * (1 - step_margin) in space-time.
  double step_margin{0.05};
  /// Static obstacles initially span this multiple of the makespan lower bound.
  double horizon_factor{1.5};
  /// Upload rounds allowed, as a multiple of the longest route in steps.
  double iteration_cap_factor{10.0};
};

struct PlanRequest
{
  std::vector<Agent> agents;
  std::vector<StaticObstacle> static_obstacles;
  std::vector<DynamicObstacle> dynamic_obstacles;
  FieldBounds field;
  PlanConfig config;

  /// Shared unscaled body radius (all agents must agree).
  double radius() const { return agents.empty() ? 0.0 : agents.front().radius; }
  double working_radius() const { return config.lambda * radius(); }

  void check() const
  {
    if (agents.empty()) throw RequestError("request has no agents");
    if (!(config.tau > 0.0)) throw RequestError("tau must be positive");
    if (!(config.lambda >= 1.0)) throw RequestError("lambda must be at least 1");
    if (!(config.step_margin > 0.0 && config.step_margin < 1.0)) {
      throw RequestError("step_margin must lie in (0, 1)");
    }
    for (const Agent & a : agents) {
      a.check();
      if (a.radius != agents.front().radius) throw RequestError("all agents must share one radius");
      if (!field.contains(a.start) || !field.contains(a.goal)) {
        throw RequestError("agent '" + a.name + "' starts or ends outside the field");
      }
    }
    for (const DynamicObstacle & d : dynamic_obstacles) {
      if (d.trajectory.empty()) throw RequestError("dynamic obstacle '" + d.name + "' has no trajectory");
      for (std::size_t k = 1; k < d.trajectory.size(); ++k) {
        if (!(d.trajectory[k].t > d.trajectory[k - 1].t)) {
          throw RequestError("dynamic obstacle '" + d.name + "' trajectory times must increase");
        }
      }
    }
  }
};

enum class PlanStatus { converged, infeasible, budget_exhausted };

inline std::string_view to_string(PlanStatus s)
{
  switch (s) {
    case PlanStatus::converged:
      return "converged";
    case PlanStatus::infeasible:
      return "infeasible";
    case PlanStatus::budget_exhausted:
      return "budget_exhausted";
  }
  return "infeasible";
}

struct IterationStats
{
  std::size_t round{0};
  PathId agent;
  std::size_t nodes{0};
  std::size_t steps{0};
  double seconds{0.0};
};

struct PlanStats
{
  std::vector<IterationStats> iterations;
  std::size_t total_nodes{0};
  double runtime_seconds{0.0};
};

struct PlanResult
{
  PlanStatus status{PlanStatus::infeasible};
  std::vector<Path> paths;      ///< one per agent, in request order
  std::vector<Path> obstacles;  ///< ingested obstacle chains
  SpaceTimeGrid grid;
  PlanStats stats;
  std::string diagnostics;
  std::vector<SpherePair> conflicting_pairs;
  double radius{0.0};
  double working_radius{0.0};
  double tau{1.0};
};

/// Straight-line route length from start to goal.
inline double route_length(const Agent & a) { return (a.goal - a.start).norm(); }

/// Makespan lower bound of one agent: from rest at full acceleration.
inline double min_travel_time(const Agent & a) { return std::sqrt(2.0 * route_length(a) / a.accel_bound); }

struct Waypoint
{
  Sphere sphere;
  Vec2 velocity;
  bool reaches_goal{false};
};

/**
 * Next sphere for `agent` along the straight line from the end of `path` to
 * the goal. The step is as long as possible while its space-time length stays
 * within `max_step`, and its time gap is the kinematic minimum at the current
 * velocity. Lands exactly on the goal when the goal is within reach.
 */
inline Waypoint next_waypoint(
  const Agent & agent, const Path & path, double working_radius, double tau, double step_margin)
{
  if (path.empty()) throw PathError("next_waypoint: path has no start sphere");
  const Sphere & last = path.back();
  const Vec2 omega = path.velocities.back();
  const Vec2 to_goal = agent.goal - last.center.spatial();
  const double remaining = to_goal.norm();
  const double max_step = 2.0 * working_radius * (1.0 - step_margin);
  const Vec2 dir = remaining > 0.0 ? (1.0 / remaining) * to_goal : Vec2{};

  auto span = [&](double len) {
    const double dt = min_timestep(len * dir, omega, agent.accel_bound);
    return std::hypot(len, tau * dt);
  };

  double len = remaining;
  bool reaches = true;
  if (span(remaining) > max_step) {
    reaches = false;
    double lo = 0.0;
    double hi = remaining;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      (span(mid) <= max_step ? lo : hi) = mid;
    }
    len = lo;
  }
  const Vec2 sigma = len * dir;
  const double dt = min_timestep(sigma, omega, agent.accel_bound);

  Waypoint wp;
  wp.sphere.center = {last.center.x + sigma.x, last.center.y + sigma.y, last.center.t + dt};
  if (reaches) {
    wp.sphere.center.x = agent.goal.x;
    wp.sphere.center.y = agent.goal.y;
  }
  wp.sphere.radius = working_radius;
  wp.sphere.spatially_immutable = reaches;
  wp.velocity = omega + (agent.accel_bound * dt) * dir;
  wp.reaches_goal = reaches;
  return wp;
}

namespace detail
{

/// Resamples a space-time polyline at even arc-length spacing no longer than `step`.
inline std::vector<StgVector> resample(const std::vector<StgVector> & pts, double step, double tau)
{
  if (pts.size() < 2) return pts;
  std::vector<double> cum{0.0};
  for (std::size_t k = 1; k < pts.size(); ++k) cum.push_back(cum.back() + stg_norm(pts[k] - pts[k - 1], tau));
  const double total = cum.back();
  const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(total / step)));
  std::vector<StgVector> out;
  std::size_t seg = 0;
  for (std::size_t j = 0; j <= pieces; ++j) {
    const double s = total * static_cast<double>(j) / static_cast<double>(pieces);
    while (seg + 2 < pts.size() && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double f = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
    out.push_back(pts[seg] + f * (pts[seg + 1] - pts[seg]));
  }
  out.back() = pts.back();
  return out;
}

inline void extend_column(SpaceTimeGrid & grid, PathId id, double horizon, double spacing)
{
  const Path & p = grid.path(id);
  double t = p.back().center.t;
  const Vec2 at = p.back().center.spatial();
  const double radius = p.back().radius;
  while (t < horizon) {
    t += spacing;
    Sphere s;
    s.center = {at.x, at.y, t};
    s.radius = radius;
    grid.upload(id, s);
  }
}

}  // namespace detail

/**
 * @brief Plans all agents by alternately uploading one waypoint per agent and
 * resolving the conflicts that upload introduced.
 *
 * Obstacles are ingested first as fully immutable chains. Static obstacles are
 * columns extended in time whenever an agent's plan approaches their horizon.
 */
inline PlanResult plan(const PlanRequest & request)
{
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  request.check();

  const PlanConfig & cfg = request.config;
  const double r = request.radius();
  const double R = request.working_radius();
  const double step = 2.0 * R * (1.0 - cfg.step_margin);

  PlanResult result;
  result.radius = r;
  result.working_radius = R;
  result.tau = cfg.tau;

  SpaceTimeGrid grid(cfg.tau);
  std::uint32_t next_id = 1;
  std::vector<PathId> agent_ids;
  for (const Agent & a : request.agents) {
    Path p;
    p.id = PathId{next_id++};
    p.name = a.name;
    p.kind = PathKind::agent;
    p.priority = a.priority;
    p.rigidity = a.rigidity;
    p.accel_bound = a.accel_bound;
    p.append({a.start.x, a.start.y, 0.0}, R, a.initial_velocity);
    if (route_length(a) == 0.0) p.converged = true;
    agent_ids.push_back(p.id);
    grid.add_path(std::move(p));
  }

  double lower_bound = 0.0;
  for (const Agent & a : request.agents) lower_bound = std::max(lower_bound, min_travel_time(a));
  double horizon = cfg.horizon_factor * (lower_bound > 0.0 ? lower_bound : 1.0);
  const double column_spacing = step / cfg.tau;

  std::vector<PathId> columns;
  for (const StaticObstacle & o : request.static_obstacles) {
    Path p;
    p.id = PathId{next_id++};
    p.name = o.name;
    p.kind = PathKind::static_obstacle;
    p.append({o.position.x, o.position.y, 0.0}, R);
    columns.push_back(p.id);
    grid.add_path(std::move(p));
    detail::extend_column(grid, columns.back(), horizon, column_spacing);
  }
  for (const DynamicObstacle & o : request.dynamic_obstacles) {
    Path p;
    p.id = PathId{next_id++};
    p.name = o.name;
    p.kind = o.kind;
    std::vector<StgVector> pts;
    for (const TimedPoint & tp : o.trajectory) pts.push_back({tp.position.x, tp.position.y, tp.t});
    for (const StgVector & c : detail::resample(pts, step, cfg.tau)) p.append(c, R);
    grid.add_path(std::move(p));
  }

  double longest_route_steps = 1.0;
  for (const Agent & a : request.agents) longest_route_steps = std::max(longest_route_steps, std::ceil(route_length(a) / step));
  const auto max_rounds = static_cast<std::size_t>(std::ceil(cfg.iteration_cap_factor * longest_route_steps));

  auto finish = [&](PlanStatus status) {
    result.status = status;
    for (PathId id : grid.path_ids()) {
      const Path & p = grid.path(id);
      (p.is_obstacle() ? result.obstacles : result.paths).push_back(p);
    }
    result.grid = grid;
    result.stats.runtime_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return result;
  };

  bool failure_from_budget = false;
  auto run_resolve = [&](std::size_t round, PathId who) -> bool {
    const auto rs = Clock::now();
    try {
      ResolveOutcome outcome = resolve_all(grid, cfg.search);
      grid = std::move(outcome.grid);
      const std::size_t steps = outcome.best ? outcome.best->steps.size() : 0;
      result.stats.iterations.push_back(
        {round, who, outcome.stats.nodes, steps, std::chrono::duration<double>(Clock::now() - rs).count()});
      result.stats.total_nodes += outcome.stats.nodes;
      return true;
    } catch (const ResolutionFailure & failure) {
      result.stats.total_nodes += failure.stats().nodes;
      result.conflicting_pairs = failure.pairs();
      failure_from_budget = failure.budget_exhausted();
      std::ostringstream msg;
      msg << failure.what() << " after uploading to '" << grid.path(who).name << "' (round " << round
          << ", " << failure.stats().nodes << " nodes); conflicting pairs:";
      for (const SpherePair & p : failure.pairs()) {
        msg << " (" << grid.path(p.first.path).name << "#" << p.first_index << ", "
            << grid.path(p.second.path).name << "#" << p.second_index << ")";
      }
      result.diagnostics = msg.str();
      return false;
    }
  };

  auto fail_status = [&]() {
    return failure_from_budget ? PlanStatus::budget_exhausted : PlanStatus::infeasible;
  };

  // Spheres placed at ingestion may already collide (e.g. overlapping obstacles).
  if (!run_resolve(0, agent_ids.front())) return finish(fail_status());

  for (std::size_t round = 1; round <= max_rounds; ++round) {
    bool all_converged = true;
    for (std::size_t i = 0; i < request.agents.size(); ++i) {
      const Agent & agent = request.agents[i];
      const PathId id = agent_ids[i];
      if (grid.path(id).converged) continue;

      const Path & current = grid.path(id);
      if ((agent.goal - current.back().center.spatial()).norm() == 0.0) {
        Path p = current;
        p.converged = true;
        p.spheres.back().spatially_immutable = true;
        grid.replace_path(std::move(p));
        continue;
      }
      Waypoint wp = next_waypoint(agent, current, R, cfg.tau, cfg.step_margin);
      for (const IndexRange & lane : agent.lane_constrained) {
        if (lane.contains(current.size())) wp.sphere.spatially_immutable = true;
      }
      grid.upload(id, wp.sphere, wp.velocity);
      {
        // A short final step can make the previous sphere redundant.
        Path p = repair(grid.path(id), cfg.tau);
        p.converged = wp.reaches_goal;
        grid.replace_path(std::move(p));
      }
      if (!wp.reaches_goal) all_converged = false;
      if (!run_resolve(round, id)) return finish(fail_status());
    }

    double latest = 0.0;
    for (PathId id : agent_ids) latest = std::max(latest, grid.path(id).back().center.t);
    if (!columns.empty() && latest + 2.0 * R / cfg.tau > horizon) {
      horizon = latest + 2.0 * R / cfg.tau;
      for (PathId id : columns) detail::extend_column(grid, id, horizon, column_spacing);
      if (!run_resolve(round, agent_ids.front())) return finish(fail_status());
    }

    for (PathId id : agent_ids) all_converged = all_converged && grid.path(id).converged;
    if (all_converged && grid.query_pairs().empty()) return finish(PlanStatus::converged);
  }
  result.diagnostics = "iteration cap reached before all agents converged";
  return finish(PlanStatus::budget_exhausted);
}

struct CapsuleViolation
{
  PathId first;
  PathId second;
  double t{0.0};
  double distance{0.0};
};

/**
 * Samples every pair of paths over their common time span and reports each
 * instant where their interpolated positions are closer than 2r. Independent
 * of the sphere representation: only waypoint positions and times are used.
 */
inline std::vector<CapsuleViolation> capsule_oracle(std::span<const Path> paths, double radius, double dt_sample)
{
  if (!(dt_sample > 0.0)) throw std::invalid_argument("capsule_oracle: dt_sample must be positive");
  std::vector<CapsuleViolation> out;
  const double limit = 2.0 * radius;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) {
      const Path & a = paths[i];
      const Path & b = paths[j];
      if (a.empty() || b.empty()) continue;
      const double lo = std::max(a.spheres.front().center.t, b.spheres.front().center.t);
      const double hi = std::min(a.back().center.t, b.back().center.t);
      if (lo > hi) continue;
      const auto samples = static_cast<std::size_t>(std::floor((hi - lo) / dt_sample));
      for (std::size_t k = 0; k <= samples + 1; ++k) {
        const double t = k <= samples ? lo + static_cast<double>(k) * dt_sample : hi;
        const double d = (interpolate(a, t) - interpolate(b, t)).norm();
        if (d < limit) out.push_back({a.id, b.id, t, d});
      }
    }
  }
  return out;
}

}  // namespace sphereplan

#endif  // SPHEREPLAN__PLANNER_HPP_
