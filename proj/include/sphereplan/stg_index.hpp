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

#ifndef SPHEREPLAN__STG_INDEX_HPP_
#define SPHEREPLAN__STG_INDEX_HPP_

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "sphereplan/geometry.hpp"
#include "sphereplan/kd_tree.hpp"
#include "sphereplan/path.hpp"

namespace sphereplan
{

class GridError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Two intersecting spheres from different paths; `first` has the lower path id.
struct SpherePair
{
  SphereRef first;
  SphereRef second;
  std::size_t first_index{0};
  std::size_t second_index{0};
  /// Both spheres belong to obstacles, so no displacement can separate them.
  bool unresolvable{false};

  friend bool operator==(const SpherePair &, const SpherePair &) = default;
};

inline bool pair_order(const SpherePair & a, const SpherePair & b)
{
  return std::tie(a.first.path, a.first_index, a.second.path, a.second_index) <
         std::tie(b.first.path, b.first_index, b.second.path, b.second_index);
}

/**
 * @brief Shared space-time container of all paths and their range-query index.
 *
 * Copies are cheap: paths are shared immutably and replaced wholesale on
 * modification, and the k-d tree is shared between copies until one side
 * rebuilds. A grid value must only be mutated by one owner at a time.
 */
class SpaceTimeGrid
{
public:
  explicit SpaceTimeGrid(double tau = 1.0, double epsilon = kTangencyTolerance)
  : tau_(tau), epsilon_(epsilon)
  {
    if (!(tau > 0.0)) throw GridError("time scale must be positive");
  }

  double tau() const { return tau_; }
  double epsilon() const { return epsilon_; }
  std::uint64_t revision() const { return revision_; }

  SpaceTimeGrid snapshot() const { return *this; }

  bool contains(PathId id) const { return paths_.count(id) != 0; }

  const Path & path(PathId id) const
  {
    auto it = paths_.find(id);
    if (it == paths_.end()) throw GridError("unknown path id " + std::to_string(id.value));
    return *it->second;
  }

  std::vector<PathId> path_ids() const
  {
    std::vector<PathId> ids;
    ids.reserve(paths_.size());
    for (const auto & [id, p] : paths_) ids.push_back(id);
    return ids;
  }

  std::size_t sphere_count() const
  {
    std::size_t n = 0;
    for (const auto & [id, p] : paths_) n += p->size();
    return n;
  }

  const Sphere * find(const SphereRef & ref) const
  {
    auto it = paths_.find(ref.path);
    if (it == paths_.end()) return nullptr;
    const auto idx = it->second->find(ref.key);
    return idx ? &it->second->spheres[*idx] : nullptr;
  }

  /// Registers a new path (possibly empty). Its spheres are indexed as given.
  void add_path(Path path)
  {
    if (contains(path.id)) throw GridError("duplicate path id " + std::to_string(path.id.value));
    path.renumber();
    set_path(std::move(path));
  }

  /// Replaces an existing path wholesale, e.g. after a shift.
  void replace_path(Path path)
  {
    if (!contains(path.id)) throw GridError("unknown path id " + std::to_string(path.id.value));
    set_path(std::move(path));
  }

  /**
   * Appends a sphere to `id`. The sphere must overlap or touch the current last
   * sphere and lie strictly later in time. Owner, index and key are assigned
   * here; immutability flags are kept (the first sphere is always pinned).
   */
  const Sphere & upload(PathId id, const Sphere & sphere, Vec2 velocity = {})
  {
    Path p = path(id);
    if (!p.empty()) {
      const Sphere & last = p.back();
      const double d = stg_norm(sphere.center - last.center, tau_);
      if (d > last.radius + sphere.radius + kValidationTolerance) {
        throw GridError("upload: sphere does not connect to the end of the path");
      }
      if (!(sphere.center.t > last.center.t)) {
        throw GridError("upload: sphere is not later than the end of the path");
      }
    }
    Sphere & added = p.append(sphere.center, sphere.radius, velocity);
    added.spatially_immutable = added.spatially_immutable || sphere.spatially_immutable;
    added.fully_immutable = added.fully_immutable || sphere.fully_immutable;
    if (added.fully_immutable) added.spatially_immutable = true;
    const SphereRef ref = added.ref();
    set_path(std::move(p));
    return *find(ref);
  }

  /// Applies a displacement to one sphere and propagates it along its path.
  void apply_shift(const DisplacementVector & dv)
  {
    replace_path(path_shift(path(dv.target.path), dv, tau_));
  }

  /**
   * Every intersecting pair of spheres from different paths, ordered by
   * (lower path id, its index, higher path id, its index). Pairs of two fully
   * immutable spheres are dropped unless both come from distinct obstacles, in
   * which case they are reported as unresolvable.
   */
  std::vector<SpherePair> query_pairs() const
  {
    std::vector<const Entry *> live;
    live.reserve(sphere_count());
    if (tree_) {
      for (const Entry & e : *built_) {
        if (!stale_.count(e.ref.path)) live.push_back(&e);
      }
    }
    for (const Entry & e : pending_) live.push_back(&e);

    std::vector<SpherePair> out;
    auto consider = [&](const Entry & a, const Entry & b) {
      if (a.ref.path == b.ref.path || !(a.ref < b.ref)) return;
      const double d = stg_norm(a.center - b.center, tau_);
      if (!(d < a.radius + b.radius - epsilon_)) return;
      bool unresolvable = false;
      if (a.fully_immutable && b.fully_immutable) {
        if (!(a.obstacle && b.obstacle)) return;
        unresolvable = true;
      }
      out.push_back({a.ref, b.ref, a.index, b.index, unresolvable});
    };

    for (const Entry * a : live) {
      if (tree_) {
        tree_->radius_query(scaled(a->center), a->radius + max_radius_, [&](std::uint32_t id) {
          const Entry & b = (*built_)[id];
          if (!stale_.count(b.ref.path)) consider(*a, b);
        });
      }
      for (const Entry & b : pending_) consider(*a, b);
    }
    std::sort(out.begin(), out.end(), pair_order);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// True iff the index holds exactly the spheres of all paths.
  bool audit() const
  {
    using Key = std::tuple<std::uint32_t, std::uint64_t, std::size_t, double, double, double, double>;
    std::multiset<Key> expected;
    for (const auto & [id, p] : paths_) {
      for (const Sphere & s : p->spheres) {
        expected.insert({id.value, s.key, s.index, s.center.x, s.center.y, s.center.t, s.radius});
      }
    }
    std::multiset<Key> actual;
    auto add = [&](const Entry & e) {
      actual.insert({e.ref.path.value, e.ref.key, e.index, e.center.x, e.center.y, e.center.t, e.radius});
    };
    if (tree_) {
      for (const Entry & e : *built_) {
        if (!stale_.count(e.ref.path)) add(e);
      }
    }
    for (const Entry & e : pending_) add(e);
    return expected == actual;
  }

  /// Number of spheres currently served by the k-d tree (for tests).
  std::size_t tree_size() const { return tree_ ? tree_->size() : 0; }
  std::size_t pending_size() const { return pending_.size(); }

private:
  struct Entry
  {
    StgVector center;
    double radius;
    SphereRef ref;
    std::size_t index;
    bool fully_immutable;
    bool obstacle;
  };

  std::array<double, 3> scaled(const StgVector & c) const { return {c.x, c.y, tau_ * c.t}; }

  static Entry entry_of(const Path & p, const Sphere & s)
  {
    return {s.center, s.radius, s.ref(), s.index, s.fully_immutable, p.is_obstacle()};
  }

  void set_path(Path path)
  {
    const PathId id = path.id;
    auto shared = std::make_shared<const Path>(std::move(path));
    paths_[id] = shared;
    ++revision_;

    // Everything this path had in the tree is now stale; its current spheres
    // live in the pending list until the next rebuild.
    if (tree_ && tree_paths_.count(id)) stale_.insert(id);
    std::erase_if(pending_, [id](const Entry & e) { return e.ref.path == id; });
    for (const Sphere & s : shared->spheres) {
      pending_.push_back(entry_of(*shared, s));
      max_radius_ = std::max(max_radius_, s.radius);
    }
    maybe_rebuild();
  }

  void maybe_rebuild()
  {
    const std::size_t total = sphere_count();
    if (total == 0) return;
    std::size_t moved = pending_.size();
    if (tree_) {
      for (const Entry & e : *built_) {
        if (stale_.count(e.ref.path)) ++moved;
      }
    }
    if (2 * moved >= total) rebuild();
  }

  void rebuild()
  {
    auto entries = std::make_shared<std::vector<Entry>>();
    std::vector<KdTree::Point> points;
    tree_paths_.clear();
    max_radius_ = 0.0;
    for (const auto & [id, p] : paths_) {
      for (const Sphere & s : p->spheres) {
        points.push_back({scaled(s.center), static_cast<std::uint32_t>(entries->size())});
        entries->push_back(entry_of(*p, s));
        max_radius_ = std::max(max_radius_, s.radius);
      }
      tree_paths_.insert(id);
    }
    tree_ = std::make_shared<const KdTree>(std::move(points));
    built_ = std::move(entries);
    stale_.clear();
    pending_.clear();
  }

  double tau_;
  double epsilon_;
  std::uint64_t revision_{0};
  std::map<PathId, std::shared_ptr<const Path>> paths_;

  std::shared_ptr<const KdTree> tree_;
  std::shared_ptr<const std::vector<Entry>> built_;
  std::set<PathId> tree_paths_;
  std::set<PathId> stale_;
  std::vector<Entry> pending_;
  double max_radius_{0.0};
};

}  // namespace sphereplan

#endif  // SPHEREPLAN__STG_INDEX_HPP_
