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

#ifndef SPHEREPLAN__GEOMETRY_HPP_
#define SPHEREPLAN__GEOMETRY_HPP_

#include <cmath>
#include <compare>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sphereplan
{

class GeometryError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Spatial 2-D vector in meters (or m/s for velocities).
struct Vec2
{
  double x{0.0};
  double y{0.0};

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;

  double norm() const { return std::hypot(x, y); }
  constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
};

/// A point or displacement in the space-time grid: (x, y) in meters, t in seconds.
struct StgVector
{
  double x{0.0};
  double y{0.0};
  double t{0.0};

  friend constexpr StgVector operator+(StgVector a, StgVector b)
  {
    return {a.x + b.x, a.y + b.y, a.t + b.t};
  }
  friend constexpr StgVector operator-(StgVector a, StgVector b)
  {
    return {a.x - b.x, a.y - b.y, a.t - b.t};
  }
  friend constexpr StgVector operator*(double s, StgVector v) { return {s * v.x, s * v.y, s * v.t}; }
  friend constexpr bool operator==(StgVector, StgVector) = default;

  constexpr Vec2 spatial() const { return {x, y}; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(t); }
};

/// Euclidean norm with the time axis scaled by `tau` (meters per second).
inline double stg_norm(const StgVector & v, double tau)
{
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw GeometryError("stg_norm: time scale must be positive and finite");
  }
  if (!v.finite()) {
    throw GeometryError("stg_norm: non-finite component");
  }
  const double scaled_t = tau * v.t;
  return std::sqrt(v.x * v.x + v.y * v.y + scaled_t * scaled_t);
}

struct PathId
{
  std::uint32_t value{0};
  friend constexpr auto operator<=>(PathId, PathId) = default;
};

/// Identifies a sphere independent of its position in the owning path. Keys are
/// never reused within a path, so references survive insertions and deletions.
struct SphereRef
{
  PathId path;
  std::uint64_t key{0};
  friend constexpr auto operator<=>(const SphereRef &, const SphereRef &) = default;
};

struct Sphere
{
  StgVector center;
  double radius{1.0};
  bool spatially_immutable{false};
  bool fully_immutable{false};
  PathId owner;
  std::size_t index{0};
  std::uint64_t key{0};

  SphereRef ref() const { return {owner, key}; }
  bool movable() const { return !fully_immutable; }
};

struct DisplacementVector
{
  SphereRef target;
  StgVector delta;
};

/// Tangency tolerance on intersection tests (meters).
inline constexpr double kTangencyTolerance = 1e-9;

/// Magnitude of the deterministic nudge applied to a mover whose center coincides
/// with its anchor.
inline constexpr double kCoincidencePerturbation = 1e-6;

/// Minimum radius inflation that makes sphere-level separation imply separation
/// of the continuous trajectories.
constexpr double inflation_factor() { return 1.0 / (std::numbers::sqrt3 - 1.0); }

inline bool spheres_intersect(
  const Sphere & a, const Sphere & b, double tau, double epsilon = kTangencyTolerance)
{
  return stg_norm(a.center - b.center, tau) < a.radius + b.radius - epsilon;
}

inline Vec2 rotate(Vec2 v, double angle)
{
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

namespace detail
{
inline std::uint64_t splitmix64(std::uint64_t z)
{
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic spatial nudge of length kCoincidencePerturbation, derived from
/// the sphere's owner and index.
inline StgVector coincidence_perturbation(const Sphere & s)
{
  const std::uint64_t h =
    detail::splitmix64((static_cast<std::uint64_t>(s.owner.value) << 32) ^ s.index);
  const double angle = static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi;
  return {kCoincidencePerturbation * std::cos(angle), kCoincidencePerturbation * std::sin(angle), 0.0};
}

/**
 * @brief Minimum translation of `mover` that leaves it tangential to `anchor`.
 *
 * The translation runs along the line of centers with magnitude (rA + rB) - d.
 * A nonzero `bias_angle` rotates the spatial part of the result, which lets two
 * spheres approaching head-on slide past each other. A spatially immutable mover
 * is only displaced along the time axis, far enough to restore tangency.
 *
 * Throws GeometryError for a fully immutable mover or coincident centers.
 */
inline DisplacementVector compute_dv(
  const Sphere & mover, const Sphere & anchor, double bias_angle, double tau)
{
  if (mover.fully_immutable) {
    throw GeometryError("compute_dv: mover is fully immutable");
  }
  const StgVector diff = mover.center - anchor.center;
  const double d = stg_norm(diff, tau);
  if (d <= 0.0) {
    throw GeometryError("compute_dv: coincident centers");
  }
  const double contact = mover.radius + anchor.radius;
  DisplacementVector dv{mover.ref(), {}};
  if (d >= contact) {
    return dv;
  }

  if (mover.spatially_immutable) {
    const double spatial = diff.spatial().norm();
    if (spatial >= contact) {
      return dv;
    }
    const double sign = diff.t < 0.0 ? -1.0 : 1.0;
    const double target_gap = std::sqrt(contact * contact - spatial * spatial) / tau;
    dv.delta = {0.0, 0.0, sign * target_gap - diff.t};
    return dv;
  }

  dv.delta = (contact / d - 1.0) * diff;
  if (bias_angle != 0.0) {
    // Rotation shortens the radial component, so stretch the biased direction
    // until tangency is reached again.
    const Vec2 r = rotate(dv.delta.spatial(), bias_angle);
    const StgVector w{r.x, r.y, dv.delta.t};
    const double t2 = tau * tau;
    const double a = w.x * w.x + w.y * w.y + t2 * w.t * w.t;
    const double b = 2.0 * (diff.x * w.x + diff.y * w.y + t2 * diff.t * w.t);
    const double c = d * d - contact * contact;
    const double s = (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a);
    dv.delta = s * w;
  }
  return dv;
}

}  // namespace sphereplan

#endif  // SPHEREPLAN__GEOMETRY_HPP_
