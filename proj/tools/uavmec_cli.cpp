// Copyright 2026 uavmec contributors
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

// Command-line front end. Links only the C API.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "uavmec/uavmec.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCap = 2;

struct Common {
  std::string scenario = "table3";
  double p0 = std::nan("");
  int slots = 0;
  int users = 0;
  double tol_outer = std::nan("");
  int max_outer = 0;
  bool literal_speed = false;
  std::string out = "out";
  bool emit_svg = false;
  bool timings = false;
  int workers = 1;
};

struct ScenarioDeleter {
  void operator()(uavmec_scenario* s) const { uavmec_scenario_free(s); }
};
struct ReportDeleter {
  void operator()(uavmec_report* r) const { uavmec_report_free(r); }
};
struct ResultsDeleter {
  void operator()(uavmec_results* r) const { uavmec_results_free(r); }
};
using ScenarioPtr = std::unique_ptr<uavmec_scenario, ScenarioDeleter>;
using ReportPtr = std::unique_ptr<uavmec_report, ReportDeleter>;
using ResultsPtr = std::unique_ptr<uavmec_results, ResultsDeleter>;

struct Failure {
  int exit_code;
};

void check(uavmec_status st, const char* what) {
  if (st == UAVMEC_OK) return;
  std::fprintf(stderr, "error: %s: %s (%s)\n", what, uavmec_last_error(), uavmec_status_name(st));
  throw Failure{kExitConfig};
}

std::string take(char* text) {
  std::string s = text ? text : "";
  uavmec_string_free(text);
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

ScenarioPtr load(const Common& c) {
  uavmec_scenario* raw = nullptr;
  if (c.scenario == "table3")
    check(uavmec_scenario_default(&raw), "default scenario");
  else
    check(uavmec_scenario_load_file(c.scenario.c_str(), &raw), c.scenario.c_str());
  ScenarioPtr base(raw);
  uavmec_overrides o;
  uavmec_overrides_init(&o);
  o.tx_power = c.p0;
  o.slots = c.slots;
  o.num_users = c.users;
  o.tol_outer = c.tol_outer;
  o.max_outer = c.max_outer;
  if (c.literal_speed) o.paper_literal_speed = 1;
  uavmec_scenario* over = nullptr;
  check(uavmec_scenario_with_overrides(base.get(), &o, &over), "overrides");
  return ScenarioPtr(over);
}

std::string out_path(const Common& c, const char* name) {
  std::error_code ec;
  std::filesystem::create_directories(c.out, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create output directory %s: %s\n", c.out.c_str(),
                 ec.message().c_str());
    throw Failure{kExitConfig};
  }
  return (std::filesystem::path(c.out) / name).string();
}

void write(const std::string& path, const std::string& text) {
  check(uavmec_write_file(path.c_str(), text.c_str()), path.c_str());
  std::fprintf(stderr, "wrote %s\n", path.c_str());
}

void add_common(CLI::App* app, Common& c, bool workers) {
  app->add_option("--scenario", c.scenario, "scenario JSON path, or table3")->capture_default_str();
  app->add_option("--p0", c.p0, "UAV transmit power override, W");
  app->add_option("--slots", c.slots, "number of time slots override")->check(CLI::PositiveNumber);
  app->add_option("--users", c.users, "user count override (circle layout)")
      ->check(CLI::PositiveNumber);
  app->add_option("--tol-outer", c.tol_outer, "outer-loop tolerance override, bits");
  app->add_option("--max-outer", c.max_outer, "outer-loop iteration cap override")
      ->check(CLI::PositiveNumber);
  app->add_flag("--paper-literal-speed", c.literal_speed,
                "bound the squared step length by the speed budget");
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_flag("--emit-svg", c.emit_svg, "also write SVG plots");
  app->add_flag("--timings", c.timings, "record wall-clock times in outputs");
  if (workers) app->add_option("--workers", c.workers, "parallel rows")->capture_default_str();
}

int cmd_run(const Common& c, const std::string& mode, const std::string& trajectory) {
  ScenarioPtr s = load(c);
  uavmec_report* raw = nullptr;
  check(uavmec_solve(s.get(), mode.c_str(), trajectory.c_str(), &raw), "solve");
  ReportPtr r(raw);
  char* text = nullptr;
  check(uavmec_report_to_json(r.get(), c.timings ? 1 : 0, &text), "report");
  write(out_path(c, "report.json"), take(text));
  check(uavmec_report_trajectory_csv(r.get(), &text), "trajectory");
  write(out_path(c, "trajectory.csv"), take(text));
  if (c.emit_svg) {
    check(uavmec_report_trajectory_svg(r.get(), &text), "svg");
    write(out_path(c, "trajectory.svg"), take(text));
  }
  const int users = uavmec_report_num_users(r.get());
  std::vector<double> bits(users);
  check(uavmec_report_user_bits(r.get(), bits.data(), bits.size()), "user bits");
  std::ostringstream sum;
  char line[160];
  std::snprintf(line, sizeof line, "scheme %s, trajectory %s\n", mode.c_str(), trajectory.c_str());
  sum << line;
  std::snprintf(line, sizeof line, "objective_bits %.10g\n", uavmec_report_objective(r.get()));
  sum << line;
  for (int m = 0; m < users; ++m) {
    std::snprintf(line, sizeof line, "user_bits_%d %.10g\n", m + 1, bits[m]);
    sum << line;
  }
  const bool converged = uavmec_report_converged(r.get()) != 0;
  std::snprintf(line, sizeof line, "outer_iterations %d (%s)\n",
                uavmec_report_outer_iterations(r.get()), converged ? "converged" : "cap hit");
  sum << line;
  if (c.timings) {
    std::snprintf(line, sizeof line, "wall_s %.3f\n", uavmec_report_total_seconds(r.get()));
    sum << line;
  }
  write(out_path(c, "summary.txt"), sum.str());
  std::fputs(sum.str().c_str(), stdout);
  return converged ? kExitOk : kExitCap;
}

int finish_results(const Common& c, uavmec_results* raw, const char* name) {
  ResultsPtr res(raw);
  char* text = nullptr;
  check(uavmec_results_csv(res.get(), c.timings ? 1 : 0, &text), "csv");
  const std::string csv = take(text);
  write(out_path(c, (std::string(name) + ".csv").c_str()), csv);
  if (c.emit_svg) {
    check(uavmec_results_svg(res.get(), &text), "svg");
    write(out_path(c, (std::string(name) + ".svg").c_str()), take(text));
  }
  std::fputs(csv.c_str(), stdout);
  const size_t failed = uavmec_results_failed(res.get());
  if (failed > 0) {
    std::fprintf(stderr, "%zu of %zu cells failed, see the error column\n", failed,
                 uavmec_results_count(res.get()));
    return kExitConfig;
  }
  return kExitOk;
}

int cmd_compare(const Common& c, const std::string& schemes, const std::string& kinds) {
  ScenarioPtr s = load(c);
  const auto sv = split_list(schemes), kv = split_list(kinds);
  const auto sc = c_strings(sv), kc = c_strings(kv);
  uavmec_results* raw = nullptr;
  check(uavmec_compare(s.get(), sc.data(), sc.size(), kc.data(), kc.size(), c.workers, &raw),
        "compare");
  return finish_results(c, raw, "compare");
}

int cmd_sweep(const Common& c, const std::string& variable, const std::string& values,
              const std::string& schemes, const std::string& kinds) {
  ScenarioPtr s = load(c);
  std::vector<double> vals;
  for (const auto& v : split_list(values)) {
    try {
      vals.push_back(std::stod(v));
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: bad sweep value '%s'\n", v.c_str());
      return kExitConfig;
    }
  }
  const auto sv = split_list(schemes), kv = split_list(kinds);
  const auto sc = c_strings(sv), kc = c_strings(kv);
  uavmec_results* raw = nullptr;
  check(uavmec_sweep(s.get(), variable.c_str(), vals.data(), vals.size(), sc.data(), sc.size(),
                     kc.data(), kc.size(), c.workers, &raw),
        "sweep");
  return finish_results(c, raw, "sweep");
}

int cmd_oracle(double tol, int users, int instances) {
  int passed = 0;
  char* text = nullptr;
  check(uavmec_oracle_check(tol, users, instances, &passed, &text), "oracle-check");
  const std::string report = take(text);
  std::fputs(report.c_str(), stdout);
  if (!passed) {
    std::istringstream in(report);
    std::string line;
    std::fprintf(stderr, "oracle-check failed:\n");
    while (std::getline(in, line))
      if (line.rfind("FAIL", 0) == 0) std::fprintf(stderr, "  %s\n", line.c_str());
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted-sum computation bits for a UAV-powered edge-computing system"};
  app.require_subcommand(1);

  Common run_c, cmp_c, sw_c;
  std::string run_mode = "partial", run_traj = "optimized";
  auto* run = app.add_subcommand("run", "solve one scenario");
  add_common(run, run_c, false);
  run->add_option("--mode", run_mode, "partial, binary, local_only or offload_only")
      ->check(CLI::IsMember({"partial", "binary", "local_only", "offload_only"}))
      ->capture_default_str();
  run->add_option("--trajectory", run_traj, "optimized, straight_line or semicircle")
      ->check(CLI::IsMember({"optimized", "straight_line", "semicircle"}))
      ->capture_default_str();

  std::string cmp_schemes = "partial,binary,local_only,offload_only";
  std::string cmp_kinds = "optimized,straight_line,semicircle";
  auto* cmp = app.add_subcommand("compare", "scheme x trajectory grid");
  add_common(cmp, cmp_c, true);
  cmp->add_option("--schemes", cmp_schemes, "comma-separated schemes")->capture_default_str();
  cmp->add_option("--trajectories", cmp_kinds, "comma-separated trajectory kinds")
      ->capture_default_str();

  std::string sw_var = "uav_power", sw_values = "0.1,0.2,0.3,0.4,0.5";
  std::string sw_schemes = "partial,binary,local_only,offload_only", sw_kinds = "optimized";
  auto* sw = app.add_subcommand("sweep", "parameter sweep");
  add_common(sw, sw_c, true);
  sw->add_option("--variable", sw_var, "uav_power or num_users")
      ->check(CLI::IsMember({"uav_power", "num_users"}))
      ->capture_default_str();
  sw->add_option("--values", sw_values, "comma-separated values")->capture_default_str();
  sw->add_option("--schemes", sw_schemes, "comma-separated schemes")->capture_default_str();
  sw->add_option("--trajectories", sw_kinds, "comma-separated trajectory kinds")
      ->capture_default_str();

  double oc_tol = 0.01;
  int oc_users = 2, oc_instances = 5;
  auto* oc = app.add_subcommand("oracle-check", "toy-scale solver vs brute-force oracle");
  oc->add_option("--tolerance", oc_tol, "relative gap tolerance")->capture_default_str();
  oc->add_option("--users", oc_users, "largest toy user count")->capture_default_str();
  oc->add_option("--instances", oc_instances, "instances per check family")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_c, run_mode, run_traj);
    if (*cmp) return cmd_compare(cmp_c, cmp_schemes, cmp_kinds);
    if (*sw) return cmd_sweep(sw_c, sw_var, sw_values, sw_schemes, sw_kinds);
    if (*oc) return cmd_oracle(oc_tol, oc_users, oc_instances);
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return kExitConfig;
}
