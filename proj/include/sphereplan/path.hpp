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

#ifndef SPHEREPLAN__PATH_HPP_
#define SPHEREPLAN__PATH_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sphereplan/geometry.hpp"

namespace sphereplan
{

class PathError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

enum class PathKind { agent, static_obstacle, dynamic_obstacle, non_connected_vehicle };

inline std::string_view to_string(PathKind kind)
{
  switch (kind) {
    case PathKind::agent:
      return "agent";
    case PathKind::static_obstacle:
      return "static";
    case PathKind::dynamic_obstacle:
      return "dynamic";
    case PathKind::non_connected_vehicle:
      return "non_connected";
  }
  return "agent";
}

inline std::optional<PathKind> path_kind_from_string(std::string_view s)
{
  if (s == "agent") return PathKind::agent;
  if (s == "static") return PathKind::static_obstacle;
  if (s == "dynamic" || s == "pedestrian") return PathKind::dynamic_obstacle;
  if (s == "non_connected") return PathKind::non_connected_vehicle;
  return std::nullopt;
}

/// Inclusive range of waypoint indices whose spheres may only move in time.
struct IndexRange
{
  std::size_t first{0};
  std::size_t last{0};
  bool contains(std::size_t i) const { return i >= first && i <= last; }
};

struct Agent
{
  std::string name;
  Vec2 start;
  Vec2 goal;
  double radius{3.5};
  double accel_bound{3.0};
  double priority{1.0};
  double rigidity{10.0};
  Vec2 initial_velocity;
  std::vector<IndexRange> lane_constrained;

  void check() const
  {
    if (!(radius > 0.0) || !(accel_bound > 0.0) || !(priority > 0.0) || !(rigidity > 0.0)) {
      throw PathError("agent '" + name + "': radius, accel_bound, priority and rigidity must be positive");
    }
  }
};

/// A trajectory discretized as a chain of space-time spheres.
///
/// `velocities[k]` is the spatial velocity at sphere k. It is kept in lockstep
/// with `spheres` and recomputed by smooth().
struct Path
{
  PathId id;
  std::string name;
  PathKind kind{PathKind::agent};
  std::vector<Sphere> spheres;
  std::vector<Vec2> velocities;
  double priority{1.0};
  double rigidity{10.0};
  double accel_bound{3.0};
  bool converged{false};
  std::uint64_t next_key{0};

  bool is_obstacle() const { return kind != PathKind::agent; }
  bool empty() const { return spheres.empty(); }
  std::size_t size() const { return spheres.size(); }
  const Sphere & back() const { return spheres.back(); }

  std::optional<std::size_t> find(std::uint64_t key) const
  {
    for (std::size_t i = 0; i < spheres.size(); ++i) {
      if (spheres[i].key == key) return i;
    }
    return std::nullopt;
  }

  /// Appends a sphere built from `center`; owner, index and key are assigned here.
  Sphere & append(StgVector center, double radius, Vec2 velocity = {})
  {
    Sphere s;
    s.center = center;
    s.radius = radius;
    s.owner = id;
    s.index = spheres.size();
    s.key = next_key++;
    s.fully_immutable = is_obstacle() || spheres.empty();
    s.spatially_immutable = s.fully_immutable;
    spheres.push_back(s);
    velocities.push_back(velocity);
    return spheres.back();
  }

  void renumber()
  {
    for (std::size_t i = 0; i < spheres.size(); ++i) {
      spheres[i].index = i;
      spheres[i].owner = id;
    }
  }
};

/**
 * Minimum time to cover the spatial displacement `sigma` from velocity `omega`
 * under acceleration bound `a_max`. Only the component of `omega` along `sigma`
 * contributes; a component pointing against `sigma` is treated as rest.
 */
inline double min_timestep(Vec2 sigma, Vec2 omega, double a_max)
{
  if (!(a_max > 0.0)) {
    throw PathError("min_timestep: acceleration bound must be positive");
  }
  const double len = sigma.norm();
  if (len == 0.0) return 0.0;
  const double along = std::max(0.0, omega.dot(sigma) / len);
  // Same root as (-w + sqrt(w^2 + 2 a s)) / a, without the cancellation at high speed.
  return 2.0 * len / (along + std::sqrt(along * along + 2.0 * a_max * len));
}

/// Share of a displacement felt at distance `d` from the displaced sphere.
inline double shift_coefficient(double d, double d_max, double rigidity)
{
  if (d_max <= 0.0) return 1.0;
  const double ratio = d / d_max;
  return std::exp(-rigidity * ratio * ratio);
}

/**
 * Forward pass that raises waypoint times to the kinematic minimum and
 * recomputes the velocity profile. Positions and the first waypoint time are
 * never touched. Obstacle paths are returned unchanged.
 */
inline Path smooth(Path path)
{
  if (path.is_obstacle() || path.spheres.empty()) return path;
  path.velocities.resize(path.spheres.size());
  for (std::size_t k = 1; k < path.spheres.size(); ++k) {
    const Sphere & prev = path.spheres[k - 1];
    Sphere & cur = path.spheres[k];
    const Vec2 sigma = cur.center.spatial() - prev.center.spatial();
    const double dt = min_timestep(sigma, path.velocities[k - 1], path.accel_bound);
    const double len = sigma.norm();
    const Vec2 dir = len > 0.0 ? (1.0 / len) * sigma : Vec2{};
    path.velocities[k] = path.velocities[k - 1] + (path.accel_bound * dt) * dir;
    if (!cur.fully_immutable) {
      cur.center.t = std::max(cur.center.t, prev.center.t + dt);
    }
  }
  return path;
}

enum class ViolationKind { connectivity, succinctness, time_order, kinematics };

inline std::string_view to_string(ViolationKind kind)
{
  switch (kind) {
    case ViolationKind::connectivity:
      return "connectivity";
    case ViolationKind::succinctness:
      return "succinctness";
    case ViolationKind::time_order:
      return "time_order";
    case ViolationKind::kinematics:
      return "kinematics";
  }
  return "connectivity";
}

struct PathViolation
{
  ViolationKind kind;
  std::size_t first;
  std::size_t second;
  double value;  ///< measured distance or time gap
  double limit;  ///< bound it was compared against
};

/// Absolute slack used when checking invariants that were established numerically.
inline constexpr double kValidationTolerance = 1e-9;

/**
 * Lists every broken chain invariant. Kinematics and succinctness are only
 * checked for agent paths; obstacle trajectories are given, not planned.
 */
inline std::vector<PathViolation> validate(const Path & path, double tau)
{
  std::vector<PathViolation> out;
  const auto & s = path.spheres;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double d = stg_norm(s[k + 1].center - s[k].center, tau);
    const double contact = s[k].radius + s[k + 1].radius;
    if (d > contact + kValidationTolerance) {
      out.push_back({ViolationKind::connectivity, k, k + 1, d, contact});
    }
    const double gap = s[k + 1].center.t - s[k].center.t;
    if (!(gap > 0.0)) {
      out.push_back({ViolationKind::time_order, k, k + 1, gap, 0.0});
    }
    if (!path.is_obstacle()) {
      const Vec2 omega = k < path.velocities.size() ? path.velocities[k] : Vec2{};
      const double dt =
        min_timestep(s[k + 1].center.spatial() - s[k].center.spatial(), omega, path.accel_bound);
      if (gap < dt - kValidationTolerance) {
        out.push_back({ViolationKind::kinematics, k, k + 1, gap, dt});
      }
    }
  }
  if (!path.is_obstacle()) {
    for (std::size_t k = 0; k + 2 < s.size(); ++k) {
      // A pinned middle sphere is load-bearing and cannot be dropped.
      if (s[k + 1].spatially_immutable || s[k + 1].fully_immutable) continue;
      const double d = stg_norm(s[k + 2].center - s[k].center, tau);
      const double contact = s[k].radius + s[k + 2].radius;
      if (d <= contact) {
        out.push_back({ViolationKind::succinctness, k, k + 2, d, contact});
      }
    }
  }
  return out;
}

namespace detail
{

/// Spacing used when filling a stretched gap. The margin keeps new neighbors
/// strictly overlapping so the next shift does not immediately split them again.
inline constexpr double kRepairSpacing = 0.95;

inline bool insert_for_connectivity(Path & path, double tau)
{
  bool changed = false;
  std::vector<Sphere> out;
  std::vector<Vec2> vel;
  out.reserve(path.spheres.size());
  for (std::size_t k = 0; k < path.spheres.size(); ++k) {
    out.push_back(path.spheres[k]);
    vel.push_back(path.velocities[k]);
    if (k + 1 == path.spheres.size()) break;
    const Sphere & a = path.spheres[k];
    const Sphere & b = path.spheres[k + 1];
    const double contact = a.radius + b.radius;
    const double d = stg_norm(b.center - a.center, tau);
    if (d <= contact) continue;
    const auto pieces = static_cast<std::size_t>(std::ceil(d / (kRepairSpacing * contact)));
    for (std::size_t j = 1; j < pieces; ++j) {
      const double f = static_cast<double>(j) / static_cast<double>(pieces);
      Sphere m;
      m.center = a.center + f * (b.center - a.center);
      m.radius = a.radius;
      m.owner = path.id;
      m.key = path.next_key++;
      m.spatially_immutable = a.spatially_immutable && b.spatially_immutable;
      out.push_back(m);
      vel.push_back(path.velocities[k] + f * (path.velocities[k + 1] - path.velocities[k]));
    }
    changed = true;
  }
  path.spheres = std::move(out);
  path.velocities = std::move(vel);
  path.renumber();
  return changed;
}

inline bool remove_for_succinctness(Path & path, double tau)
{
  bool changed = false;
  std::size_t k = 0;
  while (k + 2 < path.spheres.size()) {
    const Sphere & a = path.spheres[k];
    const Sphere & mid = path.spheres[k + 1];
    const Sphere & c = path.spheres[k + 2];
    const bool deletable = !mid.spatially_immutable && !mid.fully_immutable;
    if (deletable && stg_norm(c.center - a.center, tau) <= a.radius + c.radius) {
      path.spheres.erase(path.spheres.begin() + static_cast<std::ptrdiff_t>(k + 1));
      path.velocities.erase(path.velocities.begin() + static_cast<std::ptrdiff_t>(k + 1));
      changed = true;
    } else {
      ++k;
    }
  }
  path.renumber();
  return changed;
}

}  // namespace detail

/**
 * Smooths the chain and restores connectivity and succinctness: stretched gaps
 * are filled with evenly spaced spheres, then redundant middle spheres are
 * dropped front to back. Repeats until the chain is stable.
 */
inline Path repair(Path path, double tau)
{
  if (path.is_obstacle()) return path;
  constexpr int kMaxRounds = 64;
  path = smooth(std::move(path));
  for (int round = 0; round < kMaxRounds; ++round) {
    bool changed = detail::insert_for_connectivity(path, tau);
    if (!changed) changed = detail::remove_for_succinctness(path, tau);
    if (!changed) break;
    path = smooth(std::move(path));
  }
  return path;
}

/**
 * Displaces the sphere at `outstanding` by `delta` and drags the rest of the
 * path along with weight exp(-rigidity * (d / d_max)^2), where d is the
 * distance to the displaced sphere's original center. Spatially immutable
 * spheres follow in time only; fully immutable spheres stay put. The result is
 * smoothed and repaired.
 */
inline Path path_shift(const Path & path, std::size_t outstanding, const StgVector & delta, double tau)
{
  if (outstanding >= path.spheres.size()) {
    throw PathError("path_shift: outstanding index out of range");
  }
  if (path.spheres[outstanding].fully_immutable) {
    throw PathError("path_shift: outstanding sphere is fully immutable");
  }
  Path out = path;
  const StgVector origin = path.spheres[outstanding].center;
  double d_max = 0.0;
  std::vector<double> dist(path.spheres.size());
  for (std::size_t k = 0; k < path.spheres.size(); ++k) {
    dist[k] = stg_norm(path.spheres[k].center - origin, tau);
    d_max = std::max(d_max, dist[k]);
  }
  for (std::size_t k = 0; k < out.spheres.size(); ++k) {
    Sphere & s = out.spheres[k];
    if (s.fully_immutable) continue;
    const double mu = k == outstanding ? 1.0 : shift_coefficient(dist[k], d_max, path.rigidity);
    if (s.spatially_immutable) {
      s.center.t += mu * delta.t;
    } else {
      s.center = s.center + mu * delta;
    }
  }
  return repair(std::move(out), tau);
}

inline Path path_shift(const Path & path, const DisplacementVector & dv, double tau)
{
  if (dv.target.path != path.id) {
    throw PathError("path_shift: displacement targets another path");
  }
  const auto idx = path.find(dv.target.key);
  if (!idx) {
    throw PathError("path_shift: target sphere not in path");
  }
  return path_shift(path, *idx, dv.delta, tau);
}

/// Piecewise-linear position at time `t`.
inline Vec2 interpolate(const Path & path, double t)
{
  const auto & s = path.spheres;
  if (s.empty() || t < s.front().center.t || t > s.back().center.t) {
    throw PathError("interpolate: time outside path span");
  }
  if (s.size() == 1) return s.front().center.spatial();
  auto it = std::upper_bound(
    s.begin(), s.end(), t, [](double value, const Sphere & sp) { return value < sp.center.t; });
  if (it == s.end()) return s.back().center.spatial();
  const Sphere & b = *it;
  const Sphere & a = *(it - 1);
  const double span = b.center.t - a.center.t;
  const double f = span > 0.0 ? (t - a.center.t) / span : 0.0;
  return a.center.spatial() + f * (b.center.spatial() - a.center.spatial());
}

/// Spatial direction of travel at sphere `k` (zero for a stationary chain).
inline Vec2 local_heading(const Path & path, std::size_t k)
{
  const auto & s = path.spheres;
  if (s.size() < 2) return {};
  const std::size_t a = k + 1 < s.size() ? k : k - 1;
  const Vec2 d = s[a + 1].center.spatial() - s[a].center.spatial();
  const double n = d.norm();
  return n > 0.0 ? (1.0 / n) * d : Vec2{};
}

inline double spatial_length(const Path & path)
{
  double total = 0.0;
  for (std::size_t k = 1; k < path.spheres.size(); ++k) {
    total += (path.spheres[k].center.spatial() - path.spheres[k - 1].center.spatial()).norm();
  }
  return total;
}

}  // namespace sphereplan

#endif  // SPHEREPLAN__PATH_HPP_
