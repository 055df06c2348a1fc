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

#ifndef SPHEREPLAN__IO_HPP_
#define SPHEREPLAN__IO_HPP_

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphereplan/metrics.hpp"
#include "sphereplan/planner.hpp"

namespace sphereplan
{

class TrajectoryError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

namespace detail
{

/// Shortest decimal text that parses back to the same double.
inline std::string exact(double v)
{
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string fixed(double v, int digits)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline std::vector<std::string> split(const std::string & line, char sep)
{
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace detail

/// Everything needed to re-check a plan without re-running it.
struct TrajectorySet
{
  std::string scenario;
  double tau{1.0};
  double radius{0.0};
  double working_radius{0.0};
  std::vector<Path> paths;  ///< agents and obstacles, ordered by path id
};

inline TrajectorySet trajectory_set(const PlanResult & result, const std::string & scenario)
{
  TrajectorySet set{scenario, result.tau, result.radius, result.working_radius, result.paths};
  set.paths.insert(set.paths.end(), result.obstacles.begin(), result.obstacles.end());
  std::sort(set.paths.begin(), set.paths.end(), [](const Path & a, const Path & b) { return a.id < b.id; });
  return set;
}

inline const char * kTrajectoryHeader = "path,index,x,y,t,wx,wy";

/**
 * Writes one record per waypoint. Path metadata precedes the header as `#`
 * lines so that the file can be validated on its own.
 */
inline void write_trajectories(std::ostream & out, const TrajectorySet & set)
{
  out << "# sphereplan trajectories 1\n";
  out << "# scenario " << set.scenario << "\n";
  out << "# tau " << detail::exact(set.tau) << "\n";
  out << "# radius " << detail::exact(set.radius) << "\n";
  out << "# working_radius " << detail::exact(set.working_radius) << "\n";
  for (const Path & p : set.paths) {
    out << "# path " << p.id.value << " " << p.name << " " << to_string(p.kind) << " accel "
        << detail::exact(p.accel_bound) << " priority " << detail::exact(p.priority) << " pinned";
    bool any = false;
    for (const Sphere & s : p.spheres) {
      if (s.spatially_immutable && !s.fully_immutable) {
        out << (any ? "," : " ") << s.index;
        any = true;
      }
    }
    if (!any) out << " -";
    out << "\n";
  }
  out << kTrajectoryHeader << "\n";
  for (const Path & p : set.paths) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      const Sphere & s = p.spheres[k];
      const Vec2 w = k < p.velocities.size() ? p.velocities[k] : Vec2{};
      out << p.id.value << "," << k << "," << detail::exact(s.center.x) << "," << detail::exact(s.center.y) << ","
          << detail::exact(s.center.t) << "," << detail::exact(w.x) << "," << detail::exact(w.y) << "\n";
    }
  }
}

inline TrajectorySet read_trajectories(std::istream & in, const std::string & source = "<trajectories>")
{
  TrajectorySet set;
  std::map<std::uint32_t, Path> paths;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  auto fail = [&](const std::string & why) {
    throw TrajectoryError(source + ":" + std::to_string(lineno) + ": " + why);
  };
  auto number = [&](const std::string & text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) fail("bad number '" + text + "'");
      return v;
    } catch (const std::logic_error &) {
      fail("bad number '" + text + "'");
    }
    return 0.0;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string key;
      meta >> key;
      if (key == "scenario") {
        meta >> set.scenario;
      } else if (key == "tau" || key == "radius" || key == "working_radius") {
        std::string v;
        meta >> v;
        (key == "tau" ? set.tau : key == "radius" ? set.radius : set.working_radius) = number(v);
      } else if (key == "path") {
        std::uint32_t id = 0;
        std::string name, kind, accel_key, accel, prio_key, prio, pin_key, pins;
        meta >> id >> name >> kind >> accel_key >> accel >> prio_key >> prio >> pin_key >> pins;
        if (!meta || accel_key != "accel" || prio_key != "priority" || pin_key != "pinned") {
          fail("malformed path metadata");
        }
        const auto k = path_kind_from_string(kind);
        if (!k) fail("unknown path kind '" + kind + "'");
        Path & p = paths[id];
        p.id = PathId{id};
        p.name = name;
        p.kind = *k;
        p.accel_bound = number(accel);
        p.priority = number(prio);
        if (pins != "-") {
          for (const std::string & idx : detail::split(pins, ',')) {
            p.spheres.resize(std::max<std::size_t>(p.spheres.size(), static_cast<std::size_t>(number(idx)) + 1));
            p.spheres[static_cast<std::size_t>(number(idx))].spatially_immutable = true;
          }
        }
      }
      continue;
    }
    if (!header_seen) {
      if (line != kTrajectoryHeader) fail(std::string("expected header '") + kTrajectoryHeader + "'");
      header_seen = true;
      continue;
    }
    const auto cols = detail::split(line, ',');
    if (cols.size() != 7) fail("expected 7 columns, got " + std::to_string(cols.size()));
    const auto id = static_cast<std::uint32_t>(number(cols[0]));
    const auto index = static_cast<std::size_t>(number(cols[1]));
    auto it = paths.find(id);
    if (it == paths.end()) fail("path " + cols[0] + " has no metadata line");
    Path & p = it->second;
    if (index >= p.spheres.size()) p.spheres.resize(index + 1);
    if (index >= p.velocities.size()) p.velocities.resize(index + 1);
    Sphere & s = p.spheres[index];
    s.center = {number(cols[2]), number(cols[3]), number(cols[4])};
    s.index = index;
    s.key = index;
    s.owner = p.id;
    s.radius = set.working_radius;
    s.fully_immutable = p.is_obstacle() || index == 0;
    s.spatially_immutable = s.spatially_immutable || s.fully_immutable;
    p.velocities[index] = {number(cols[5]), number(cols[6])};
  }
  if (!header_seen) fail("missing header row");
  if (!(set.tau > 0.0) || !(set.working_radius > 0.0)) fail("missing tau or working_radius metadata");
  for (auto & [id, p] : paths) {
    p.next_key = p.spheres.size();
    set.paths.push_back(std::move(p));
  }
  return set;
}

struct TrajectoryCheck
{
  std::vector<CapsuleViolation> collisions;
  std::vector<std::pair<PathId, PathViolation>> chain;

  bool clean() const { return collisions.empty() && chain.empty(); }
};

inline TrajectoryCheck check_trajectories(const TrajectorySet & set, double dt_sample = 0.01)
{
  TrajectoryCheck out;
  out.collisions = capsule_oracle(set.paths, set.radius, dt_sample);
  for (const Path & p : set.paths) {
    for (const PathViolation & v : validate(p, set.tau)) out.chain.emplace_back(p.id, v);
  }
  return out;
}

/// Positions of every path sampled at `rate` Hz over its own time span.
inline void write_track(std::ostream & out, const TrajectorySet & set, double rate = 100.0)
{
  out << "path,t,x,y\n";
  for (const Path & p : set.paths) {
    if (p.empty()) continue;
    const double t0 = p.spheres.front().center.t;
    const double t1 = p.back().center.t;
    const auto n = static_cast<std::size_t>(std::floor((t1 - t0) * rate + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) {
      const double t = std::min(t1, t0 + static_cast<double>(k) / rate);
      const Vec2 q = interpolate(p, t);
      out << p.id.value << "," << detail::fixed(t, 2) << "," << detail::fixed(q.x, 6) << "," << detail::fixed(q.y, 6)
          << "\n";
    }
  }
}

inline std::string ratio_text(const std::optional<double> & r) { return r ? detail::fixed(*r, 3) : "n/a"; }

inline void write_report_table(std::ostream & out, const MetricsReport & report)
{
  char buf[256];
  std::snprintf(
    buf, sizeof(buf), "%-10s %-5s %-16s %3s %3s %10s %9s %9s %8s %8s %8s\n", "scenario", "class", "status", "N",
    "M", "runtime_s", "dist_m", "span_s", "r_dist", "r_span", "overall");
  out << buf;
  for (const ScenarioReport & s : report.scenarios) {
    const std::string dist = s.measured ? detail::fixed(s.measured->distance, 3) : "-";
    const std::string span = s.measured ? detail::fixed(s.measured->makespan, 3) : "-";
    std::snprintf(
      buf, sizeof(buf), "%-10s %-5c %-16s %3zu %3zu %10.4f %9s %9s %8s %8s %8s\n", s.name.c_str(),
      s.scenario_class, std::string(to_string(s.status)).c_str(), s.agents, s.obstacles, s.runtime_seconds,
      dist.c_str(), span.c_str(), ratio_text(s.ratios.distance).c_str(), ratio_text(s.ratios.makespan).c_str(),
      ratio_text(s.ratios.overall).c_str());
    out << buf;
  }
  out << "trials: " << report.trials << "\n";
  for (const ScenarioReport & s : report.scenarios) {
    if (!s.diagnostics.empty()) out << s.name << ": " << s.diagnostics << "\n";
  }
}

inline nlohmann::json report_json(const MetricsReport & report)
{
  using nlohmann::json;
  auto opt = [](const std::optional<double> & v) { return v ? json(*v) : json(nullptr); };
  json rows = json::array();
  for (const ScenarioReport & s : report.scenarios) {
    json row{
      {"name", s.name},
      {"class", std::string(1, s.scenario_class)},
      {"status", to_string(s.status)},
      {"agents", s.agents},
      {"obstacles", s.obstacles},
      {"runtime_s", s.runtime_seconds},
      {"nodes", s.nodes},
      {"distance_m", s.measured ? json(s.measured->distance) : json(nullptr)},
      {"makespan_s", s.measured ? json(s.measured->makespan) : json(nullptr)},
      {"distance_lower_bound_m", s.bounds.distance},
      {"makespan_lower_bound_s", s.bounds.makespan},
      {"distance_ratio", opt(s.ratios.distance)},
      {"makespan_ratio", opt(s.ratios.makespan)},
      {"overall_ratio", opt(s.ratios.overall)},
    };
    if (!s.diagnostics.empty()) row["diagnostics"] = s.diagnostics;
    rows.push_back(std::move(row));
  }
  return json{{"trials", report.trials}, {"scenarios", std::move(rows)}};
}

namespace detail
{

inline const std::array<const char *, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                  "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

inline std::string path_color(const Path & p, std::size_t agent_rank)
{
  if (p.kind == PathKind::static_obstacle) return "#444444";
  if (p.is_obstacle()) return "#7f7f7f";
  return kPalette[agent_rank % kPalette.size()];
}

struct Panel
{
  double x0, y0, w, h;        // pixel box
  double u0, u1, v0, v1;      // data ranges
  std::string u_label, v_label;

  double px(double u) const { return x0 + (u - u0) / (u1 - u0) * w; }
  double py(double v) const { return y0 + h - (v - v0) / (v1 - v0) * h; }
};

inline void panel_frame(std::ostream & out, const Panel & p)
{
  out << "<rect x=\"" << fixed(p.x0, 1) << "\" y=\"" << fixed(p.y0, 1) << "\" width=\"" << fixed(p.w, 1)
      << "\" height=\"" << fixed(p.h, 1) << "\" fill=\"none\" stroke=\"#000\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << fixed(p.x0 + p.w / 2, 1) << "\" y=\"" << fixed(p.y0 + p.h + 28, 1)
      << "\" text-anchor=\"middle\">" << p.u_label << "</text>\n";
  out << "<text x=\"" << fixed(p.x0 - 28, 1) << "\" y=\"" << fixed(p.y0 + p.h / 2, 1)
      << "\" text-anchor=\"middle\">" << p.v_label << "</text>\n";
  out << "<text x=\"" << fixed(p.x0, 1) << "\" y=\"" << fixed(p.y0 + p.h + 14, 1) << "\">" << fixed(p.u0, 1)
      << "</text>\n";
  out << "<text x=\"" << fixed(p.x0 + p.w, 1) << "\" y=\"" << fixed(p.y0 + p.h + 14, 1)
      << "\" text-anchor=\"end\">" << fixed(p.u1, 1) << "</text>\n";
  out << "<text x=\"" << fixed(p.x0 - 4, 1) << "\" y=\"" << fixed(p.y0 + 10, 1) << "\" text-anchor=\"end\">"
      << fixed(p.v1, 1) << "</text>\n";
}

template <class Project>
void panel_paths(std::ostream & out, const Panel & panel, const TrajectorySet & set, Project project, bool circles)
{
  std::size_t rank = 0;
  for (const Path & p : set.paths) {
    const std::string color = path_color(p, rank);
    if (!p.is_obstacle()) ++rank;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const Sphere & s : p.spheres) {
      const auto [u, v] = project(s.center);
      out << fixed(panel.px(u), 2) << "," << fixed(panel.py(v), 2) << " ";
    }
    out << "\"/>\n";
    for (const Sphere & s : p.spheres) {
      const auto [u, v] = project(s.center);
      if (circles) {
        const double rpx = set.radius / (panel.u1 - panel.u0) * panel.w;
        out << "<circle cx=\"" << fixed(panel.px(u), 2) << "\" cy=\"" << fixed(panel.py(v), 2) << "\" r=\""
            << fixed(rpx, 2) << "\" fill=\"" << color << "\" fill-opacity=\"0.06\" stroke=\"none\"/>\n";
      }
      out << "<circle cx=\"" << fixed(panel.px(u), 2) << "\" cy=\"" << fixed(panel.py(v), 2)
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
  }
}

inline std::array<double, 4> spatial_extent(const TrajectorySet & set)
{
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  bool first = true;
  for (const Path & p : set.paths) {
    for (const Sphere & s : p.spheres) {
      if (first) {
        x0 = x1 = s.center.x;
        y0 = y1 = s.center.y;
        first = false;
      }
      x0 = std::min(x0, s.center.x);
      x1 = std::max(x1, s.center.x);
      y0 = std::min(y0, s.center.y);
      y1 = std::max(y1, s.center.y);
    }
  }
  const double pad = std::max(1.0, set.radius);
  return {x0 - pad, x1 + pad, y0 - pad, y1 + pad};
}

inline double agent_time_extent(const TrajectorySet & set)
{
  double t = 1.0;
  for (const Path & p : set.paths) {
    if (!p.is_obstacle() && !p.empty()) t = std::max(t, p.back().center.t);
  }
  return t * 1.1;
}

}  // namespace detail

/// Top-down (x, y) view: waypoint tracks with body-radius discs.
inline void write_svg_topdown(std::ostream & out, const TrajectorySet & set)
{
  const auto [x0, x1, y0, y1] = detail::spatial_extent(set);
  const double scale = 500.0 / std::max(x1 - x0, y1 - y0);
  detail::Panel panel{50, 30, (x1 - x0) * scale, (y1 - y0) * scale, x0, x1, y0, y1, "x [m]", "y [m]"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fixed(panel.w + 80, 0) << "\" height=\""
      << detail::fixed(panel.h + 80, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<text x=\"50\" y=\"18\">" << set.scenario << " (top-down)</text>\n";
  detail::panel_frame(out, panel);
  detail::panel_paths(out, panel, set, [](const StgVector & c) { return std::pair{c.x, c.y}; }, true);
  out << "</svg>\n";
}

/// Three projections of the space-time grid: (x, y), (x, t) and (y, t).
inline void write_svg_triptych(std::ostream & out, const TrajectorySet & set)
{
  const auto [x0, x1, y0, y1] = detail::spatial_extent(set);
  const double t1 = detail::agent_time_extent(set);
  const double size = 260.0;
  const detail::Panel xy{50, 30, size, size, x0, x1, y0, y1, "x [m]", "y [m]"};
  const detail::Panel xt{50 + size + 70, 30, size, size, x0, x1, 0.0, t1, "x [m]", "t [s]"};
  const detail::Panel yt{50 + 2 * (size + 70), 30, size, size, y0, y1, 0.0, t1, "y [m]", "t [s]"};
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fixed(50 + 3 * size + 2 * 70 + 30, 0)
      << "\" height=\"" << detail::fixed(size + 80, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<text x=\"50\" y=\"18\">" << set.scenario << " (space-time projections)</text>\n";
  out << "<defs><clipPath id=\"xt\"><rect x=\"" << xt.x0 << "\" y=\"" << xt.y0 << "\" width=\"" << xt.w
      << "\" height=\"" << xt.h << "\"/></clipPath><clipPath id=\"yt\"><rect x=\"" << yt.x0 << "\" y=\"" << yt.y0
      << "\" width=\"" << yt.w << "\" height=\"" << yt.h << "\"/></clipPath></defs>\n";
  for (const detail::Panel * p : {&xy, &xt, &yt}) detail::panel_frame(out, *p);
  detail::panel_paths(out, xy, set, [](const StgVector & c) { return std::pair{c.x, c.y}; }, false);
  out << "<g clip-path=\"url(#xt)\">\n";
  detail::panel_paths(out, xt, set, [](const StgVector & c) { return std::pair{c.x, c.t}; }, false);
  out << "</g>\n<g clip-path=\"url(#yt)\">\n";
  detail::panel_paths(out, yt, set, [](const StgVector & c) { return std::pair{c.y, c.t}; }, false);
  out << "</g>\n</svg>\n";
}

}  // namespace sphereplan

#endif  // SPHEREPLAN__IO_HPP_
