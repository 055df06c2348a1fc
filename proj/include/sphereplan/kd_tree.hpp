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

#ifndef SPHEREPLAN__KD_TREE_HPP_
#define SPHEREPLAN__KD_TREE_HPP_

#include <algorithm>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace sphereplan
{

/// Static 3-D k-d tree stored implicitly: the median of every index range is
/// its splitting node, with the split axis cycling x, y, z by depth.
class KdTree
{
public:
  struct Point
  {
    std::array<double, 3> c;
    std::uint32_t id;
  };

  KdTree() = default;
  explicit KdTree(std::vector<Point> points) : points_(std::move(points))
  {
    build(0, points_.size(), 0);
  }

  std::size_t size() const { return points_.size(); }

  /// Calls `visit(id)` for every point within Euclidean distance `radius` of `q`.
  template <class Visit>
  void radius_query(const std::array<double, 3> & q, double radius, Visit && visit) const
  {
    query(0, points_.size(), 0, q, radius, radius * radius, visit);
  }

private:
  void build(std::size_t lo, std::size_t hi, int depth)
  {
    if (hi - lo <= 1) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const int axis = depth % 3;
    std::nth_element(
      points_.begin() + static_cast<std::ptrdiff_t>(lo), points_.begin() + static_cast<std::ptrdiff_t>(mid),
      points_.begin() + static_cast<std::ptrdiff_t>(hi), [axis](const Point & a, const Point & b) {
        return a.c[axis] < b.c[axis] || (a.c[axis] == b.c[axis] && a.id < b.id);
      });
    build(lo, mid, depth + 1);
    build(mid + 1, hi, depth + 1);
  }

  template <class Visit>
  void query(
    std::size_t lo, std::size_t hi, int depth, const std::array<double, 3> & q, double radius,
    double radius2, Visit & visit) const
  {
    if (lo >= hi) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const Point & p = points_[mid];
    const double dx = p.c[0] - q[0];
    const double dy = p.c[1] - q[1];
    const double dz = p.c[2] - q[2];
    if (dx * dx + dy * dy + dz * dz <= radius2) visit(p.id);
    const int axis = depth % 3;
    const double delta = q[axis] - p.c[axis];
    if (delta - radius <= 0.0) query(lo, mid, depth + 1, q, radius, radius2, visit);
    if (delta + radius >= 0.0) query(mid + 1, hi, depth + 1, q, radius, radius2, visit);
  }

  std::vector<Point> points_;
};

}  // namespace sphereplan

#endif  // SPHEREPLAN__KD_TREE_HPP_
