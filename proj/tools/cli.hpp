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

#ifndef SPHEREPLAN_TOOLS__CLI_HPP_
#define SPHEREPLAN_TOOLS__CLI_HPP_

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sphereplan/io.hpp"
#include "sphereplan/metrics.hpp"
#include "sphereplan/scenario.hpp"

namespace sphereplan::cli
{

enum ExitCode : int {
  kOk = 0,
  kViolations = 1,
  kInfeasible = 2,
  kBudgetExhausted = 3,
  kInputError = 4,
};

inline int exit_code(PlanStatus s)
{
  switch (s) {
    case PlanStatus::converged:
      return kOk;
    case PlanStatus::infeasible:
      return kInfeasible;
    case PlanStatus::budget_exhausted:
      return kBudgetExhausted;
  }
  return kInfeasible;
}

struct Overrides
{
  std::optional<double> tau;
  std::optional<double> lambda;
  std::optional<double> bias;
  std::optional<std::size_t> max_nodes;
  std::optional<std::size_t> max_solutions;
  std::optional<std::size_t> max_depth;

  void apply(PlanConfig & cfg) const
  {
    if (tau) cfg.tau = *tau;
    if (lambda) cfg.lambda = *lambda;
    if (bias) cfg.search.bias_angle = *bias;
    if (max_nodes) cfg.search.budget.max_nodes = *max_nodes;
    if (max_solutions) cfg.search.budget.max_solutions = *max_solutions;
    if (max_depth) cfg.search.budget.max_depth = *max_depth;
  }
};

struct CliConfig
{
  std::string subcommand;
  std::vector<std::string> inputs;
  std::string out_dir;
  std::size_t trials{1};
  bool single_thread{false};
  std::string format{"text"};
  bool plots{false};
  int verbosity{0};
  Overrides overrides;
};

inline std::string default_out_dir()
{
  const char * env = std::getenv("SPHEREPLAN_OUT");
  return env && *env ? env : "out";
}

namespace detail
{

inline std::ofstream open_out(const std::filesystem::path & file)
{
  std::ofstream f(file, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + file.string());
  return f;
}

inline ScenarioSpec load_with_overrides(const std::string & file, const Overrides & ov)
{
  ScenarioSpec spec = load_scenario(file);
  ov.apply(spec.config);
  return spec;
}

inline void write_plots(const TrajectorySet & set, const std::filesystem::path & dir, const std::string & stem)
{
  auto top = open_out(dir / (stem + ".topdown.svg"));
  write_svg_topdown(top, set);
  auto tri = open_out(dir / (stem + ".triptych.svg"));
  write_svg_triptych(tri, set);
}

}  // namespace detail

inline int cmd_plan(const CliConfig & cfg, std::ostream & out, std::ostream & err)
{
  ScenarioSpec spec;
  try {
    spec = detail::load_with_overrides(cfg.inputs.at(0), cfg.overrides);
    spec.to_request().check();
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  const PlanResult result = plan(spec.to_request());
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  const TrajectorySet set = trajectory_set(result, spec.name);
  {
    auto f = detail::open_out(dir / (spec.name + ".traj.csv"));
    write_trajectories(f, set);
  }
  {
    auto f = detail::open_out(dir / (spec.name + ".track.csv"));
    write_track(f, set);
  }
  if (cfg.plots) detail::write_plots(set, dir, spec.name);

  nlohmann::json stats{
    {"scenario", spec.name},
    {"status", to_string(result.status)},
    {"runtime_s", result.stats.runtime_seconds},
    {"nodes", result.stats.total_nodes},
    {"resolves", result.stats.iterations.size()},
  };
  if (!result.diagnostics.empty()) stats["diagnostics"] = result.diagnostics;
  if (result.status == PlanStatus::converged) {
    const Measured m = measured_metrics(result);
    const Ratios r = suboptimality(m, {distance_lower_bound(spec.agents), makespan_lower_bound(spec.agents)});
    stats["distance_m"] = m.distance;
    stats["makespan_s"] = m.makespan;
    stats["distance_ratio"] = r.distance ? nlohmann::json(*r.distance) : nlohmann::json(nullptr);
    stats["makespan_ratio"] = r.makespan ? nlohmann::json(*r.makespan) : nlohmann::json(nullptr);
  }
  {
    auto f = detail::open_out(dir / (spec.name + ".stats.json"));
    f << stats.dump(2) << "\n";
  }

  if (cfg.format == "json") {
    out << stats.dump(2) << "\n";
  } else {
    out << spec.name << ": " << to_string(result.status) << " in " << sphereplan::detail::fixed(result.stats.runtime_seconds, 4)
        << " s (" << result.stats.total_nodes << " search nodes)\n";
    if (stats.contains("distance_m")) {
      out << "  distance " << sphereplan::detail::fixed(stats["distance_m"].get<double>(), 3) << " m, makespan "
          << sphereplan::detail::fixed(stats["makespan_s"].get<double>(), 3) << " s\n";
    }
    if (cfg.verbosity > 0) {
      for (const Path & p : result.paths) {
        out << "  " << p.name << ": " << p.size() << " waypoints, arrives t=" << sphereplan::detail::fixed(p.back().center.t, 3)
            << "\n";
      }
    }
    out << "  trajectories: " << (dir / (spec.name + ".traj.csv")).string() << "\n";
  }
  if (!result.diagnostics.empty()) err << spec.name << ": " << result.diagnostics << "\n";
  return exit_code(result.status);
}

inline int cmd_suite(const CliConfig & cfg, std::ostream & out, std::ostream & err)
{
  std::vector<ScenarioSpec> specs;
  try {
    for (const std::string & f : cfg.inputs) {
      specs.push_back(detail::load_with_overrides(f, cfg.overrides));
      specs.back().to_request().check();
    }
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  if (cfg.trials < 1) {
    err << "error: --trials must be at least 1\n";
    return kInputError;
  }

  const MetricsReport report = run_suite(specs, cfg.trials, !cfg.single_thread);
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  {
    auto f = detail::open_out(dir / "report.txt");
    write_report_table(f, report);
  }
  {
    auto f = detail::open_out(dir / "report.json");
    f << report_json(report).dump(2) << "\n";
  }
  if (cfg.format == "json") {
    out << report_json(report).dump(2) << "\n";
  } else {
    write_report_table(out, report);
  }

  int code = kOk;
  std::size_t failed = 0;
  for (const ScenarioReport & s : report.scenarios) {
    if (s.status == PlanStatus::converged) continue;
    ++failed;
    if (s.status == PlanStatus::infeasible || code == kOk) code = exit_code(s.status);
  }
  if (failed > 0) err << failed << " of " << report.scenarios.size() << " scenarios did not converge\n";
  return code;
}

inline int cmd_validate(const CliConfig & cfg, std::ostream & out, std::ostream & err)
{
  int code = kOk;
  for (const std::string & file : cfg.inputs) {
    TrajectorySet set;
    try {
      std::ifstream in(file);
      if (!in) throw TrajectoryError(file + ": cannot open file");
      set = read_trajectories(in, file);
    } catch (const std::exception & e) {
      err << "error: " << e.what() << "\n";
      return kInputError;
    }
    const TrajectoryCheck check = check_trajectories(set);
    auto name = [&](PathId id) {
      for (const Path & p : set.paths) {
        if (p.id == id) return p.name;
      }
      return std::to_string(id.value);
    };
    for (const CapsuleViolation & v : check.collisions) {
      out << file << ": collision " << name(v.first) << " / " << name(v.second) << " at t="
          << sphereplan::detail::fixed(v.t, 2) << " distance " << sphereplan::detail::fixed(v.distance, 4) << " m\n";
    }
    for (const auto & [id, v] : check.chain) {
      out << file << ": " << to_string(v.kind) << " on " << name(id) << " waypoints " << v.first << "-" << v.second
          << " value " << sphereplan::detail::exact(v.value) << " limit " << sphereplan::detail::exact(v.limit) << "\n";
    }
    if (check.clean()) {
      out << file << ": clean (" << set.paths.size() << " paths)\n";
    } else {
      code = kViolations;
    }
  }
  return code;
}

inline int cmd_plot(const CliConfig & cfg, std::ostream & out, std::ostream & err)
{
  const std::filesystem::path dir(cfg.out_dir);
  for (const std::string & file : cfg.inputs) {
    TrajectorySet set;
    try {
      std::ifstream in(file);
      if (!in) throw TrajectoryError(file + ": cannot open file");
      set = read_trajectories(in, file);
    } catch (const std::exception & e) {
      err << "error: " << e.what() << "\n";
      return kInputError;
    }
    std::filesystem::create_directories(dir);
    const std::string stem = set.scenario.empty() ? std::filesystem::path(file).stem().string() : set.scenario;
    detail::write_plots(set, dir, stem);
    out << (dir / (stem + ".topdown.svg")).string() << "\n" << (dir / (stem + ".triptych.svg")).string() << "\n";
  }
  return kOk;
}

/// Parses `argv` and runs the chosen subcommand. Never calls exit().
inline int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CliConfig cfg;
  cfg.out_dir = default_out_dir();

  CLI::App app{"Multi-agent space-time sphere planner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sphereplan 1.0.0");

  auto add_common = [&](CLI::App * sub) {
    sub->add_option("-o,--out", cfg.out_dir, "output directory (default: $SPHEREPLAN_OUT or ./out)");
    sub->add_option("--format", cfg.format, "stdout format")->check(CLI::IsMember({"text", "json"}));
    sub->add_flag("-v,--verbose", cfg.verbosity, "more output");
  };
  auto add_overrides = [&](CLI::App * sub) {
    sub->add_option("--tau", cfg.overrides.tau, "time scale of the grid")->check(CLI::PositiveNumber);
    sub->add_option("--lambda", cfg.overrides.lambda, "radius inflation factor")->check(CLI::Range(1.0, 1e9));
    sub->add_option("--bias", cfg.overrides.bias, "head-on bias angle [rad]");
    sub->add_option("--max-nodes", cfg.overrides.max_nodes, "search node budget per resolve");
    sub->add_option("--max-solutions", cfg.overrides.max_solutions, "solutions collected per seed");
    sub->add_option("--max-depth", cfg.overrides.max_depth, "call depth limit (0: sphere count)");
  };

  CLI::App * plan_cmd = app.add_subcommand("plan", "plan one scenario and write its trajectories");
  plan_cmd->add_option("scenario", cfg.inputs, "scenario file")->required()->expected(1)->check(CLI::ExistingFile);
  plan_cmd->add_flag("--plot", cfg.plots, "also write SVG plots");
  add_common(plan_cmd);
  add_overrides(plan_cmd);

  CLI::App * suite_cmd = app.add_subcommand("suite", "plan several scenarios and write a metrics report");
  suite_cmd->add_option("scenarios", cfg.inputs, "scenario files")->required()->check(CLI::ExistingFile);
  suite_cmd->add_option("-n,--trials", cfg.trials, "runs per scenario for runtime averaging");
  suite_cmd->add_flag("--single-thread", cfg.single_thread, "run scenarios one after another");
  add_common(suite_cmd);
  add_overrides(suite_cmd);

  CLI::App * validate_cmd = app.add_subcommand("validate", "check trajectory files for collisions and chain faults");
  validate_cmd->add_option("trajectories", cfg.inputs, "trajectory files")->required();
  add_common(validate_cmd);

  CLI::App * plot_cmd = app.add_subcommand("plot", "render trajectory files as SVG");
  plot_cmd->add_option("trajectories", cfg.inputs, "trajectory files")->required();
  add_common(plot_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion &) {
    out << "sphereplan 1.0.0\n";
    return kOk;
  } catch (const CLI::ParseError & e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (plan_cmd->parsed()) return cmd_plan(cfg, out, err);
    if (suite_cmd->parsed()) return cmd_suite(cfg, out, err);
    if (validate_cmd->parsed()) return cmd_validate(cfg, out, err);
    return cmd_plot(cfg, out, err);
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace sphereplan::cli

#endif  // SPHEREPLAN_TOOLS__CLI_HPP_
