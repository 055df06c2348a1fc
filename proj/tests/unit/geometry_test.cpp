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
#include <limits>
#include <random>

#include "sphereplan/geometry.hpp"

namespace sphereplan
{
namespace
{

Sphere sphere_at(StgVector c, double radius, std::uint32_t owner = 1, std::size_t index = 0)
{
  Sphere s;
  s.center = c;
  s.radius = radius;
  s.owner = PathId{owner};
  s.index = index;
  return s;
}

TEST(StgNorm, SpatialPythagoras) { EXPECT_DOUBLE_EQ(stg_norm({3.0, 4.0, 0.0}, 1.0), 5.0); }

TEST(StgNorm, ZeroVector) { EXPECT_DOUBLE_EQ(stg_norm({0.0, 0.0, 0.0}, 1.0), 0.0); }

TEST(StgNorm, TimeIsScaled) { EXPECT_DOUBLE_EQ(stg_norm({0.0, 0.0, 2.0}, 1.5), 3.0); }

TEST(StgNorm, RejectsNonFinite)
{
  EXPECT_THROW(stg_norm({std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0}, 1.0), GeometryError);
  EXPECT_THROW(stg_norm({0.0, 0.0, std::numeric_limits<double>::infinity()}, 1.0), GeometryError);
  EXPECT_THROW(stg_norm({1.0, 0.0, 0.0}, 0.0), GeometryError);
}

TEST(SpheresIntersect, TangencyIsNotAnIntersection)
{
  const double R = 4.78;
  EXPECT_FALSE(spheres_intersect(sphere_at({0, 0, 0}, R), sphere_at({2 * R, 0, 0}, R), 1.0));
  EXPECT_TRUE(spheres_intersect(sphere_at({0, 0, 0}, R), sphere_at({R, 0, 0}, R), 1.0));
  EXPECT_FALSE(spheres_intersect(sphere_at({0, 0, 0}, R), sphere_at({2 * R + 1e-9, 0, 0}, R), 1.0));
  // Within the tolerance band below tangency still counts as touching.
  EXPECT_FALSE(spheres_intersect(sphere_at({0, 0, 0}, R), sphere_at({2 * R - 5e-10, 0, 0}, R), 1.0));
}

TEST(InflationFactor, Value)
{
  EXPECT_NEAR(inflation_factor(), 1.3660254037844386, 1e-15);
  EXPECT_NEAR(inflation_factor() * (std::sqrt(3.0) - 1.0), 1.0, 1e-15);
}

// Two tangent spheres of one chain and a third sphere touching both: the third
// sphere's distance to the segment between the first two equals R + r exactly
// when R = lambda* r, so it just touches the body capsule of radius r.
TEST(InflationFactor, StraddlingSphereTouchesCapsule)
{
  const double r = 3.5;
  const double R = inflation_factor() * r;
  const StgVector a{-R, 0.0, 0.0};
  const StgVector b{R, 0.0, 0.0};
  const StgVector c{0.0, std::sqrt(3.0) * R, 0.0};
  EXPECT_NEAR(stg_norm(c - a, 1.0), 2 * R, 1e-12);
  EXPECT_NEAR(stg_norm(c - b, 1.0), 2 * R, 1e-12);
  EXPECT_NEAR(c.y, R + r, 1e-12);
}

TEST(ComputeDv, DeepOverlapMovesByTheOverlap)
{
  const double R = 4.78;
  const auto dv = compute_dv(sphere_at({R, 0, 0}, R), sphere_at({0, 0, 0}, R, 2), 0.0, 1.0);
  EXPECT_NEAR(stg_norm(dv.delta, 1.0), R, 1e-12);
}

TEST(ComputeDv, AlreadyTangentIsZero)
{
  const double R = 4.78;
  const auto dv = compute_dv(sphere_at({2 * R, 0, 0}, R), sphere_at({0, 0, 0}, R, 2), 0.0, 1.0);
  EXPECT_EQ(stg_norm(dv.delta, 1.0), 0.0);
}

TEST(ComputeDv, UnitExample)
{
  const auto dv = compute_dv(sphere_at({1, 0, 0}, 1.0), sphere_at({0, 0, 0}, 1.0, 2), 0.0, 1.0);
  EXPECT_DOUBLE_EQ(dv.delta.x, 1.0);
  EXPECT_DOUBLE_EQ(dv.delta.y, 0.0);
  EXPECT_DOUBLE_EQ(dv.delta.t, 0.0);
}

TEST(ComputeDv, TargetsTheMover)
{
  Sphere m = sphere_at({1, 0, 0}, 1.0, 7, 3);
  m.key = 42;
  const auto dv = compute_dv(m, sphere_at({0, 0, 0}, 1.0, 2), 0.0, 1.0);
  EXPECT_EQ(dv.target.path.value, 7u);
  EXPECT_EQ(dv.target.key, 42u);
}

TEST(ComputeDv, Errors)
{
  Sphere pinned = sphere_at({1, 0, 0}, 1.0);
  pinned.fully_immutable = true;
  EXPECT_THROW(compute_dv(pinned, sphere_at({0, 0, 0}, 1.0, 2), 0.0, 1.0), GeometryError);
  EXPECT_THROW(compute_dv(sphere_at({0, 0, 0}, 1.0), sphere_at({0, 0, 0}, 1.0, 2), 0.0, 1.0), GeometryError);
}

TEST(ComputeDv, SpatiallyImmutableMovesInTimeOnly)
{
  Sphere m = sphere_at({1.0, 0.0, 0.5}, 2.0);
  m.spatially_immutable = true;
  const auto dv = compute_dv(m, sphere_at({0, 0, 0}, 2.0, 2), 0.0, 2.0);
  EXPECT_EQ(dv.delta.x, 0.0);
  EXPECT_EQ(dv.delta.y, 0.0);
  EXPECT_GT(dv.delta.t, 0.0);
  // Lands exactly on tangency: 1^2 + (2 t)^2 = 4^2.
  EXPECT_NEAR(0.5 + dv.delta.t, std::sqrt(15.0) / 2.0, 1e-12);
}

TEST(ComputeDv, SpatiallyImmutableBeyondReachIsZero)
{
  Sphere m = sphere_at({5.0, 0.0, 0.1}, 2.0);
  m.spatially_immutable = true;
  const auto dv = compute_dv(m, sphere_at({0, 0, 0}, 3.0, 2), 0.0, 1.0);
  EXPECT_EQ(dv.delta.t, 0.0);
}

// Property: every DV, biased or not, leaves the pair exactly tangent.
TEST(ComputeDv, RestoresTangency)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  std::uniform_real_distribution<double> rad(0.5, 3.0);
  std::uniform_real_distribution<double> ang(-0.5, 0.5);
  for (int i = 0; i < 2000; ++i) {
    const double tau = 0.5 + std::abs(u(rng));
    Sphere a = sphere_at({u(rng), u(rng), u(rng)}, rad(rng));
    const Sphere b = sphere_at({u(rng), u(rng), u(rng)}, rad(rng), 2);
    a.spatially_immutable = i % 5 == 0;
    const double bias = i % 2 == 0 ? 0.0 : ang(rng);
    const double d = stg_norm(a.center - b.center, tau);
    if (d >= a.radius + b.radius || d == 0.0) continue;
    const auto dv = compute_dv(a, b, bias, tau);
    Sphere moved = a;
    moved.center = moved.center + dv.delta;
    const double after = stg_norm(moved.center - b.center, tau);
    if (a.spatially_immutable) {
      EXPECT_GE(after, a.radius + b.radius - 1e-9);
    } else {
      EXPECT_NEAR(after, a.radius + b.radius, 1e-9);
    }
  }
}

TEST(ComputeDv, BiasRotatesClockwiseConsistently)
{
  const auto plain = compute_dv(sphere_at({0, 1, 0}, 1.0), sphere_at({0, 0, 0}, 1.0, 2), 0.0, 1.0);
  const auto biased = compute_dv(sphere_at({0, 1, 0}, 1.0), sphere_at({0, 0, 0}, 1.0, 2), 0.1, 1.0);
  EXPECT_LT(biased.delta.x, 0.0);
  EXPECT_GT(stg_norm(biased.delta, 1.0), stg_norm(plain.delta, 1.0));
}

TEST(CoincidencePerturbation, DeterministicAndSmall)
{
  const Sphere a = sphere_at({0, 0, 0}, 1.0, 3, 4);
  const StgVector p = coincidence_perturbation(a);
  const StgVector q = coincidence_perturbation(a);
  EXPECT_EQ(p.x, q.x);
  EXPECT_EQ(p.y, q.y);
  EXPECT_EQ(p.t, 0.0);
  EXPECT_NEAR(std::hypot(p.x, p.y), kCoincidencePerturbation, 1e-18);
  const StgVector other = coincidence_perturbation(sphere_at({0, 0, 0}, 1.0, 3, 5));
  EXPECT_NE(p.x, other.x);
}

}  // namespace
}  // namespace sphereplan
