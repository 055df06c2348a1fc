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

#ifndef SPHEREPLAN__METRICS_HPP_
#define SPHEREPLAN__METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphereplan/planner.hpp"
#include "sphereplan/scenario.hpp"

namespace sphereplan
{

inline double distance_lower_bound(std::span<const Agent> agents)
{
  double total = 0.0;
  for (const Agent & a : agents) total += route_length(a);
  return total;
}

inline double makespan_lower_bound(std::span<const Agent> agents)
{
  double bound = 0.0;
  for (const Agent & a : agents) bound = std::max(bound, min_travel_time(a));
  return bound;
}

struct Measured
{
  double distance{0.0};
  double makespan{0.0};
};

/// Total spatial distance and makespan of a converged plan.
inline Measured measured_metrics(const PlanResult & result)
{
  if (result.status != PlanStatus::converged) {
    throw std::invalid_argument("measured_metrics: plan did not converge");
  }
  Measured m;
  for (const Path & p : result.paths) {
    m.distance += spatial_length(p);
    if (!p.empty()) m.makespan = std::max(m.makespan, p.back().center.t);
  }
  return m;
}

/// Suboptimality ratios; a ratio whose lower bound is zero is not applicable.
struct Ratios
{
  std::optional<double> distance;
  std::optional<double> makespan;
  std::optional<double> overall;
};

inline Ratios suboptimality(const Measured & measured, const Measured & bounds)
{
  Ratios r;
  if (bounds.distance > 0.0) r.distance = measured.distance / bounds.distance;
  if (bounds.makespan > 0.0) r.makespan = measured.makespan / bounds.makespan;
  if (r.distance && r.makespan) r.overall = (*r.distance + *r.makespan) / 2.0;
  return r;
}

struct ScenarioReport
{
  std::string name;
  char scenario_class{'F'};
  PlanStatus status{PlanStatus::infeasible};
  std::size_t agents{0};
  std::size_t obstacles{0};
  double runtime_seconds{0.0};  ///< mean over trials
  std::size_t nodes{0};
  std::optional<Measured> measured;
  Measured bounds;
  Ratios ratios;
  std::string diagnostics;
};

struct MetricsReport
{
  std::size_t trials{0};
  std::vector<ScenarioReport> scenarios;

  bool all_converged() const
  {
    return std::all_of(scenarios.begin(), scenarios.end(), [](const ScenarioReport & s) {
      return s.status == PlanStatus::converged;
    });
  }
};

/// Plans one scenario `trials` times. Metrics come from the first run.
inline ScenarioReport run_scenario(const ScenarioSpec & spec, std::size_t trials, PlanResult * first = nullptr)
{
  if (trials < 1) throw std::invalid_argument("run_scenario: trials must be at least 1");
  ScenarioReport rep;
  rep.name = spec.name;
  rep.scenario_class = class_letter(spec.scenario_class);
  rep.agents = spec.agents.size();
  rep.obstacles = spec.static_obstacles.size() + spec.dynamic_obstacles.size();
  rep.bounds = {distance_lower_bound(spec.agents), makespan_lower_bound(spec.agents)};

  const PlanRequest request = spec.to_request();
  double runtime = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    PlanResult result = plan(request);
    runtime += result.stats.runtime_seconds;
    if (k == 0) {
      rep.status = result.status;
      rep.nodes = result.stats.total_nodes;
      rep.diagnostics = result.diagnostics;
      if (result.status == PlanStatus::converged) {
        rep.measured = measured_metrics(result);
        rep.ratios = suboptimality(*rep.measured, rep.bounds);
      }
      if (first != nullptr) *first = std::move(result);
    }
  }
  rep.runtime_seconds = runtime / static_cast<double>(trials);
  return rep;
}

/**
 * Runs every scenario. With `parallel` the scenarios run concurrently (one
 * task each); rows keep the input order either way.
 */
inline MetricsReport run_suite(std::span<const ScenarioSpec> specs, std::size_t trials, bool parallel = false)
{
  if (trials < 1) throw std::invalid_argument("run_suite: trials must be at least 1");
  MetricsReport report;
  report.trials = trials;
  if (!parallel) {
    for (const ScenarioSpec & s : specs) report.scenarios.push_back(run_scenario(s, trials));
    return report;
  }
  std::vector<std::future<ScenarioReport>> jobs;
  for (const ScenarioSpec & s : specs) {
    jobs.push_back(std::async(std::launch::async, [&s, trials] { return run_scenario(s, trials); }));
  }
  for (auto & j : jobs) report.scenarios.push_back(j.get());
  return report;
}

}  // namespace sphereplan

#endif  // SPHEREPLAN__METRICS_HPP_
