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

#ifndef SPHEREPLAN__CONFLICT_SEARCH_HPP_
#define SPHEREPLAN__CONFLICT_SEARCH_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sphereplan/geometry.hpp"
#include "sphereplan/path.hpp"
#include "sphereplan/stg_index.hpp"

namespace sphereplan
{

struct SearchBudget
{
  /// Maximum number of spheres called in one sequence; 0 means the grid's
  /// sphere count at the start of the search.
  std::size_t max_depth{0};
  /// Solutions collected per seed displacement before that seed stops.
  std::size_t max_solutions{64};
  /// Search nodes (sphere calls) per resolve_all.
  std::size_t max_nodes{100000};
};

struct SearchConfig
{
  double bias_angle{0.1};
  /// Two headings count as head-on when they are this close to antiparallel.
  double head_on_tolerance{5.0 * std::numbers::pi / 180.0};
  SearchBudget budget;
};

struct SolutionStep
{
  SphereRef sphere;
  std::size_t index{0};  ///< position of the sphere in its path when it was called
  StgVector delta;
};

struct Solution
{
  std::vector<SolutionStep> steps;
  double cost{0.0};
};

struct SearchStats
{
  std::size_t nodes{0};
  std::size_t solutions{0};
  bool budget_exhausted{false};
};

/// No displacement sequence found for the current conflict.
class ResolutionFailure : public std::runtime_error
{
public:
  ResolutionFailure(std::string what, std::vector<SpherePair> pairs, SearchStats stats)
  : std::runtime_error(std::move(what)), pairs_(std::move(pairs)), stats_(stats)
  {
  }

  const std::vector<SpherePair> & pairs() const { return pairs_; }
  const SearchStats & stats() const { return stats_; }
  bool budget_exhausted() const { return stats_.budget_exhausted; }

private:
  std::vector<SpherePair> pairs_;
  SearchStats stats_;
};

/// Spheres already called on the current branch. Each branch owns its copy.
using VisitedSet = std::set<SphereRef>;

struct SearchContext
{
  SearchConfig config;
  std::size_t max_depth{0};
  std::size_t seed_solutions{0};
  SearchStats stats;
};

/// Sum of priority-weighted displacement magnitudes.
inline double score(
  const Solution & solution, const std::map<PathId, double> & priorities, double tau)
{
  double total = 0.0;
  for (const auto & step : solution.steps) {
    total += priorities.at(step.sphere.path) * stg_norm(step.delta, tau);
  }
  return total;
}

inline std::map<PathId, double> priorities_of(const SpaceTimeGrid & grid)
{
  std::map<PathId, double> out;
  for (PathId id : grid.path_ids()) out[id] = grid.path(id).priority;
  return out;
}

namespace detail
{

/// Headings antiparallel within `tolerance`. A static obstacle has no heading;
/// a path driving straight at it counts as head-on.
inline bool head_on(const SpaceTimeGrid & grid, const Sphere & a, const Sphere & b, double tolerance)
{
  const Path & pa = grid.path(a.owner);
  const Path & pb = grid.path(b.owner);
  if (pa.kind == PathKind::static_obstacle && pb.kind == PathKind::static_obstacle) return false;
  if (pa.kind == PathKind::static_obstacle) return head_on(grid, b, a, tolerance);
  const Vec2 ha = local_heading(pa, a.index);
  if (ha.norm() == 0.0) return false;
  if (pb.kind == PathKind::static_obstacle) {
    const Vec2 to_obstacle = b.center.spatial() - a.center.spatial();
    if (to_obstacle.norm() == 0.0) return false;
    return ha.dot(to_obstacle) >= std::cos(tolerance) * ha.norm() * to_obstacle.norm();
  }
  const Vec2 hb = local_heading(pb, b.index);
  if (hb.norm() == 0.0) return false;
  return ha.dot(hb) <= -std::cos(tolerance) * ha.norm() * hb.norm();
}

/// Point of the obstacle's center polyline nearest to `q` in the scaled metric.
inline StgVector nearest_on_trajectory(const Path & obstacle, const StgVector & q, double tau)
{
  const auto & s = obstacle.spheres;
  if (s.size() == 1) {
    // A single sphere is a point, except for a static column, which is a line.
    return obstacle.kind == PathKind::static_obstacle ? StgVector{s[0].center.x, s[0].center.y, q.t} : s[0].center;
  }
  const double t2 = tau * tau;
  StgVector best = s[0].center;
  double best_d = stg_norm(q - best, tau);
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const StgVector a = s[k].center;
    const StgVector ab = s[k + 1].center - a;
    const StgVector aq = q - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y + t2 * ab.t * ab.t;
    double f = len2 > 0.0 ? (aq.x * ab.x + aq.y * ab.y + t2 * aq.t * ab.t) / len2 : 0.0;
    // A static column extends past its last sphere, which is only a horizon.
    const bool open_end = obstacle.kind == PathKind::static_obstacle && k + 2 == s.size();
    f = std::max(0.0, open_end ? f : std::min(1.0, f));
    if (obstacle.kind == PathKind::static_obstacle && k == 0 && q.t < a.t) f = (q.t - a.t) / ab.t;
    const StgVector p = a + f * ab;
    const double d = stg_norm(q - p, tau);
    if (d < best_d) {
      best = p;
      best_d = d;
    }
  }
  return best;
}

/// Displacement of `mover` away from `anchor`, or nothing if `mover` is pinned.
/// Obstacle trajectories are known in full, so the mover is pushed away from
/// the nearest point of the obstacle's trajectory rather than from one of its
/// spheres; this clears the neighboring spheres of the same obstacle too.
inline std::optional<DisplacementVector> branch_dv(
  const SpaceTimeGrid & grid, const Sphere & mover, Sphere anchor, double bias)
{
  if (mover.fully_immutable) return std::nullopt;
  const double tau = grid.tau();
  const Path & anchor_path = grid.path(anchor.owner);
  if (anchor_path.is_obstacle()) anchor.center = nearest_on_trajectory(anchor_path, mover.center, tau);
  if (stg_norm(mover.center - anchor.center, tau) > 0.0) {
    return compute_dv(mover, anchor, bias, tau);
  }
  Sphere nudged = mover;
  const StgVector nudge = coincidence_perturbation(mover);
  nudged.center = nudged.center + nudge;
  DisplacementVector dv = compute_dv(nudged, anchor, bias, tau);
  dv.delta = dv.delta + nudge;
  return dv;
}

/// Both displacements for an intersecting pair, computed on the same grid state.
/// Head-on pairs rotate both by the same world-frame angle so that the two
/// spheres slide past on opposite sides.
inline std::pair<std::optional<DisplacementVector>, std::optional<DisplacementVector>> pair_dvs(
  const SpaceTimeGrid & grid, const SpherePair & pair, const SearchConfig & config)
{
  const Sphere * a = grid.find(pair.first);
  const Sphere * b = grid.find(pair.second);
  double bias = 0.0;
  if (config.bias_angle != 0.0 && head_on(grid, *a, *b, config.head_on_tolerance)) {
    bias = config.bias_angle;
  }
  return {branch_dv(grid, *a, *b, bias), branch_dv(grid, *b, *a, bias)};
}

inline bool out_of_budget(SearchContext & ctx)
{
  const auto & budget = ctx.config.budget;
  if (ctx.stats.nodes >= budget.max_nodes) {
    ctx.stats.budget_exhausted = true;
    return true;
  }
  return ctx.seed_solutions >= budget.max_solutions;
}

}  // namespace detail

/**
 * @brief Calls `dv.target`: shifts it on a snapshot of `grid`, then resolves
 * every intersection that remains by recursively calling either sphere of each
 * pair.
 *
 * Every returned solution lists its steps in application order and, replayed
 * from `grid`, leaves no intersecting pair. An empty result means the call is
 * infeasible (revisit, unresolved conflict, or budget).
 */
inline std::vector<Solution> resolve(
  const SpaceTimeGrid & grid, const DisplacementVector & dv, VisitedSet visited, SearchContext & ctx)
{
  if (visited.count(dv.target)) return {};
  if (detail::out_of_budget(ctx)) return {};
  if (visited.size() >= ctx.max_depth) {
    // The default depth is the sphere count, which only a revisit can exceed.
    if (ctx.config.budget.max_depth != 0) ctx.stats.budget_exhausted = true;
    return {};
  }
  const Sphere * target = grid.find(dv.target);
  if (target == nullptr || target->fully_immutable) return {};
  ++ctx.stats.nodes;
  visited.insert(dv.target);

  const SolutionStep step{dv.target, target->index, dv.delta};
  SpaceTimeGrid next = grid.snapshot();
  next.apply_shift(dv);
  const std::vector<SpherePair> pairs = next.query_pairs();
  if (pairs.empty()) {
    ++ctx.seed_solutions;
    ++ctx.stats.solutions;
    return {Solution{{step}, 0.0}};
  }

  std::vector<Solution> collected;
  for (const SpherePair & pair : pairs) {
    if (pair.unresolvable) continue;
    const auto [first_dv, second_dv] = detail::pair_dvs(next, pair, ctx.config);
    for (const auto & branch : {first_dv, second_dv}) {
      if (!branch) continue;
      auto found = resolve(next, *branch, visited, ctx);
      collected.insert(collected.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
    }
    if (detail::out_of_budget(ctx)) break;
  }
  for (Solution & s : collected) s.steps.insert(s.steps.begin(), step);
  return collected;
}

struct ResolveOutcome
{
  std::optional<Solution> best;
  SpaceTimeGrid grid;
  SearchStats stats;
};

/// Strict ordering used to pick the winner: cost, then step count, then the
/// (path id, index) of the first step.
inline bool better_solution(const Solution & a, const Solution & b)
{
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.steps.size() != b.steps.size()) return a.steps.size() < b.steps.size();
  if (a.steps.empty()) return false;
  return std::tie(a.steps.front().sphere.path, a.steps.front().index) <
         std::tie(b.steps.front().sphere.path, b.steps.front().index);
}

/// Replays a solution's displacements in order.
inline SpaceTimeGrid replay(const SpaceTimeGrid & grid, const Solution & solution)
{
  SpaceTimeGrid out = grid.snapshot();
  for (const auto & step : solution.steps) out.apply_shift({step.sphere, step.delta});
  return out;
}

/**
 * Resolves all conflict in `grid`. Every pair present is used as a seed (both
 * of its spheres), the collected solutions are scored and the cheapest one is
 * replayed onto the returned grid.
 *
 * Throws ResolutionFailure when nothing was found.
 */
inline ResolveOutcome resolve_all(const SpaceTimeGrid & grid, const SearchConfig & config = {})
{
  const std::vector<SpherePair> pairs = grid.query_pairs();
  if (pairs.empty()) return {std::nullopt, grid, {}};
  for (const SpherePair & p : pairs) {
    if (p.unresolvable) {
      throw ResolutionFailure("obstacles overlap each other", pairs, {});
    }
  }

  SearchContext ctx{config, config.budget.max_depth ? config.budget.max_depth : grid.sphere_count(), 0, {}};
  std::vector<Solution> all;
  for (const SpherePair & pair : pairs) {
    const auto [first_dv, second_dv] = detail::pair_dvs(grid, pair, config);
    for (const auto & seed : {first_dv, second_dv}) {
      if (!seed) continue;
      ctx.seed_solutions = 0;
      auto found = resolve(grid, *seed, {}, ctx);
      all.insert(all.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
      if (ctx.stats.nodes >= config.budget.max_nodes) break;
    }
    if (ctx.stats.nodes >= config.budget.max_nodes) break;
  }
  if (all.empty()) {
    throw ResolutionFailure(
      ctx.stats.budget_exhausted ? "search budget exhausted" : "no displacement sequence resolves the conflict",
      pairs, ctx.stats);
  }

  const auto priorities = priorities_of(grid);
  for (Solution & s : all) s.cost = score(s, priorities, grid.tau());
  const Solution & best = *std::min_element(all.begin(), all.end(), better_solution);
  SpaceTimeGrid resolved = replay(grid, best);
  return {best, std::move(resolved), ctx.stats};
}

}  // namespace sphereplan

#endif  // SPHEREPLAN__CONFLICT_SEARCH_HPP_
