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

#include "core/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "core/error.hpp"

namespace uavmec {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw Error(ErrorCode::kParse, "unterminated quote in CSV line");
  return fields;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse, "bad number in column " + what + ": '" + text + "'");
  }
}

struct Task {
  Scenario scenario;
  Scheme scheme;
  TrajectoryKind kind;
  SweepVariable variable;
  double value;
};

ExperimentResult run_task(const Task& task) {
  ExperimentResult row;
  row.fingerprint = scenario_fingerprint(task.scenario);
  row.scheme = task.scheme;
  row.trajectory = task.kind;
  row.variable = task.variable;
  row.value = task.value;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const SolveReport r = run_scheme(task.scenario, task.scheme, task.kind);
    row.objective = r.objective;
    row.user_bits.assign(r.user_bits.data(), r.user_bits.data() + r.user_bits.size());
    row.outer_iterations = r.outer_iterations;
    row.converged = r.converged;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

// Rows land in task order, so the output never depends on scheduling.
std::vector<ExperimentResult> run_tasks(const std::vector<Task>& tasks, int workers) {
  std::vector<ExperimentResult> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) rows[i] = run_task(tasks[i]);
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace

const char* sweep_variable_name(SweepVariable v) {
  return v == SweepVariable::kUavPower ? "uav_power" : "num_users";
}

SweepVariable parse_sweep_variable(const std::string& name) {
  if (name == "uav_power") return SweepVariable::kUavPower;
  if (name == "num_users") return SweepVariable::kNumUsers;
  throw Error(ErrorCode::kInvalidArgument, "unknown sweep variable '" + name + "'");
}

Trajectory baseline_trajectory(TrajectoryKind kind, const Scenario& s) {
  if (kind == TrajectoryKind::kStraightLine) return straight_line_trajectory(s);
  if (kind != TrajectoryKind::kSemicircle)
    throw Error(ErrorCode::kInvalidArgument, "baseline trajectory must be a fixed kind");
  const Vec2 a = s.uav.start, b = s.uav.end;
  const double length = (b - a).norm();
  const int n = s.num_slots();
  Trajectory tr;
  tr.waypoints.assign(n + 1, a);
  if (length == 0.0) return tr;
  const double arc_speed = std::numbers::pi * length / (2.0 * s.grid.horizon);
  if (arc_speed > s.uav.max_speed)
    throw Error(ErrorCode::kInfeasible,
                "semicircle baseline needs speed " + fmt(arc_speed) + " m/s above the limit " +
                    fmt(s.uav.max_speed) + " m/s");
  const Vec2 c = 0.5 * (a + b);
  Vec2 centroid = Vec2::Zero();
  for (const auto& u : s.users) centroid += u.position;
  centroid /= static_cast<double>(s.users.size());
  const Vec2 d = (b - a) / length;
  const Vec2 left(-d.y(), d.x());
  // Bulge toward the users; left of travel on a tie.
  const double side = (centroid - c).dot(left) < 0.0 ? -1.0 : 1.0;
  const double r = 0.5 * length;
  for (int k = 0; k <= n; ++k) {
    const double th = std::numbers::pi * k / n;
    tr.waypoints[k] = c - r * std::cos(th) * d + side * r * std::sin(th) * left;
  }
  tr.waypoints[0] = a;
  tr.waypoints[n] = b;
  for (int k = 0; k < n; ++k)
    if (!s.step_ok(tr.waypoints[k], tr.waypoints[k + 1]))
      throw Error(ErrorCode::kInfeasible, "semicircle baseline breaks the per-slot speed limit");
  return tr;
}

SolveReport baseline_mode(Scheme scheme, const Scenario& s) {
  if (scheme != Scheme::kLocalOnly && scheme != Scheme::kOffloadOnly)
    throw Error(ErrorCode::kInvalidArgument,
                std::string("baseline mode must be single-family, got ") + scheme_name(scheme));
  return run_scheme(s, scheme, TrajectoryKind::kOptimized);
}

SolveReport run_scheme(const Scenario& s, Scheme scheme, TrajectoryKind kind) {
  const bool optimize = kind == TrajectoryKind::kOptimized;
  const Trajectory start = optimize ? straight_line_trajectory(s) : baseline_trajectory(kind, s);
  switch (scheme) {
    case Scheme::kPartial:
      return algorithm1(s, start, optimize);
    case Scheme::kBinary:
      return algorithm2(s, start, optimize);
    case Scheme::kLocalOnly:
      return algorithm1(s, start, optimize,
                        std::vector<UserMode>(s.num_users(), UserMode::kLocalOnly));
    case Scheme::kOffloadOnly:
      return algorithm1(s, start, optimize,
                        std::vector<UserMode>(s.num_users(), UserMode::kOffloadOnly));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown scheme");
}

std::vector<ExperimentResult> sweep(const Scenario& base, SweepVariable variable,
                                    const std::vector<double>& values, const SweepOptions& opt) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "sweep values must be nonempty");
  std::vector<Task> tasks;
  for (Scheme sc : opt.schemes) {
    for (TrajectoryKind kind : opt.trajectories) {
      for (double v : values) {
        Task t{base, sc, kind, variable, v};
        if (variable == SweepVariable::kUavPower) {
          t.scenario.uav.tx_power = v;
          validate_scenario(t.scenario);
        } else {
          const int m = static_cast<int>(std::lround(v));
          if (m < 1 || std::fabs(v - m) > 1e-9)
            throw Error(ErrorCode::kInvalidArgument, "num_users values must be positive integers");
          t.scenario = circle_layout_scenario(base, m);
        }
        tasks.push_back(std::move(t));
      }
    }
  }
  return run_tasks(tasks, opt.workers);
}

std::vector<ExperimentResult> compare(const Scenario& s, const std::vector<Scheme>& schemes,
                                      const std::vector<TrajectoryKind>& kinds, int workers) {
  std::vector<Task> tasks;
  for (Scheme sc : schemes)
    for (TrajectoryKind kind : kinds)
      tasks.push_back({s, sc, kind, SweepVariable::kUavPower, s.uav.tx_power});
  return run_tasks(tasks, workers);
}

std::string results_csv(const std::vector<ExperimentResult>& rows, bool include_timings) {
  std::size_t users = 0;
  for (const auto& r : rows) users = std::max(users, r.user_bits.size());
  std::ostringstream out;
  out << "scheme,variable,value,objective_bits";
  for (std::size_t m = 0; m < users; ++m) out << ",user_bits_" << m + 1;
  out << ",outer_iters,wall_s,trajectory,converged,fingerprint,error\n";
  for (const auto& r : rows) {
    out << scheme_name(r.scheme) << ',' << sweep_variable_name(r.variable) << ',' << fmt(r.value)
        << ',' << fmt(r.objective);
    for (std::size_t m = 0; m < users; ++m) {
      out << ',';
      if (m < r.user_bits.size()) out << fmt(r.user_bits[m]);
    }
    char fp[24];
    std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(r.fingerprint));
    out << ',' << r.outer_iterations << ',' << fmt(include_timings ? r.wall_s : 0.0) << ','
        << trajectory_name(r.trajectory) << ',' << (r.converged ? 1 : 0) << ',' << fp << ','
        << (r.error.empty() ? "" : quote(r.error)) << '\n';
  }
  return out.str();
}

std::vector<ExperimentResult> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, "CSV is empty");
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* need : {"scheme", "variable", "value", "objective_bits", "outer_iters",
                           "wall_s", "trajectory", "converged", "fingerprint", "error"})
    if (!col.count(need)) throw Error(ErrorCode::kParse, std::string("CSV lacks column ") + need);
  std::size_t users = 0;
  while (col.count("user_bits_" + std::to_string(users + 1))) ++users;
  std::vector<ExperimentResult> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw Error(ErrorCode::kParse, "CSV row has " + std::to_string(f.size()) +
                                         " fields, header has " + std::to_string(header.size()));
    ExperimentResult r;
    try {
      r.scheme = parse_scheme(f[col["scheme"]]);
      r.trajectory = parse_trajectory(f[col["trajectory"]]);
      r.variable = parse_sweep_variable(f[col["variable"]]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, e.what());
    }
    r.value = parse_double(f[col["value"]], "value");
    r.objective = parse_double(f[col["objective_bits"]], "objective_bits");
    for (std::size_t m = 0; m < users; ++m) {
      const std::string& cell = f[col["user_bits_" + std::to_string(m + 1)]];
      if (!cell.empty()) r.user_bits.push_back(parse_double(cell, "user_bits"));
    }
    r.outer_iterations = static_cast<int>(parse_double(f[col["outer_iters"]], "outer_iters"));
    r.wall_s = parse_double(f[col["wall_s"]], "wall_s");
    r.converged = f[col["converged"]] == "1";
    r.fingerprint = std::stoull(f[col["fingerprint"]], nullptr, 16);
    r.error = f[col["error"]];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string trajectory_csv(const SolveReport& r) {
  std::ostringstream out;
  out << "iter,slot,x,y\n";
  for (std::size_t i = 0; i < r.trajectory_trace.size(); ++i) {
    const auto& wp = r.trajectory_trace[i].waypoints;
    for (std::size_t n = 0; n < wp.size(); ++n)
      out << i << ',' << n << ',' << fmt(wp[n].x()) << ',' << fmt(wp[n].y()) << '\n';
  }
  return out.str();
}

namespace {

struct Frame {
  double x0, y0, scale;
  double px(double x) const { return 40.0 + (x - x0) * scale; }
  double py(double y) const { return 440.0 - (y - y0) * scale; }
};

Frame fit(const std::vector<Vec2>& pts) {
  double x0 = pts[0].x(), x1 = x0, y0 = pts[0].y(), y1 = y0;
  for (const auto& p : pts) {
    x0 = std::min(x0, p.x()); x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y()); y1 = std::max(y1, p.y());
  }
  const double span = std::max({x1 - x0, y1 - y0, 1e-9});
  return {x0, y0, 400.0 / span};
}

std::string polyline(const std::vector<Vec2>& pts, const Frame& fr, const char* style) {
  std::ostringstream out;
  out << "<polyline fill=\"none\" " << style << " points=\"";
  for (const auto& p : pts) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f,%.3f ", fr.px(p.x()), fr.py(p.y()));
    out << buf;
  }
  out << "\"/>\n";
  return out.str();
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string trajectory_svg(const SolveReport& r, const Scenario& s) {
  std::vector<Vec2> all = r.traj.waypoints;
  for (const auto& u : s.users) all.push_back(u.position);
  if (!r.trajectory_trace.empty())
    for (const auto& p : r.trajectory_trace.front().waypoints) all.push_back(p);
  const Frame fr = fit(all);
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\">\n"
      << "<rect width=\"480\" height=\"480\" fill=\"white\"/>\n";
  if (!r.trajectory_trace.empty())
    out << polyline(r.trajectory_trace.front().waypoints, fr,
                    "stroke=\"#999\" stroke-dasharray=\"4 3\"");
  out << polyline(r.traj.waypoints, fr, "stroke=\"#1f77b4\" stroke-width=\"2\"");
  for (std::size_t m = 0; m < s.users.size(); ++m) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"5\" fill=\"#d62728\"/>"
                  "<text x=\"%.3f\" y=\"%.3f\" font-size=\"12\">U%zu</text>\n",
                  fr.px(s.users[m].position.x()), fr.py(s.users[m].position.y()),
                  fr.px(s.users[m].position.x()) + 7, fr.py(s.users[m].position.y()) - 7, m + 1);
    out << buf;
  }
  out << "</svg>\n";
  return out.str();
}

std::string sweep_svg(const std::vector<ExperimentResult>& rows) {
  std::map<std::pair<int, int>, std::vector<Vec2>> series;
  std::vector<Vec2> all;
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    series[{static_cast<int>(r.scheme), static_cast<int>(r.trajectory)}].emplace_back(r.value,
                                                                                    r.objective);
    all.emplace_back(r.value, r.objective);
  }
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\">\n"
      << "<rect width=\"480\" height=\"480\" fill=\"white\"/>\n";
  if (!all.empty()) {
    // Axes scale independently for the curves.
    double x0 = all[0].x(), x1 = x0, y0 = all[0].y(), y1 = y0;
    for (const auto& p : all) {
      x0 = std::min(x0, p.x()); x1 = std::max(x1, p.x());
      y0 = std::min(y0, p.y()); y1 = std::max(y1, p.y());
    }
    const double sx = 400.0 / std::max(x1 - x0, 1e-12), sy = 400.0 / std::max(y1 - y0, 1e-12);
    int k = 0, line = 0;
    for (const auto& [key, pts] : series) {
      std::vector<Vec2> mapped;
      for (const auto& p : pts) mapped.emplace_back((p.x() - x0) * sx, (p.y() - y0) * sy);
      const std::string style = std::string("stroke=\"") + kPalette[k++ % 6] + "\"";
      out << polyline(mapped, Frame{0.0, 0.0, 1.0}, style.c_str());
      char buf[200];
      std::snprintf(buf, sizeof buf, "<text x=\"50\" y=\"%d\" font-size=\"12\" fill=\"%s\">%s/%s</text>\n",
                    20 + 14 * line++, kPalette[(k - 1) % 6],
                    scheme_name(static_cast<Scheme>(key.first)),
                    trajectory_name(static_cast<TrajectoryKind>(key.second)));
      out << buf;
    }
  }
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

double measure_runtime(const Scenario& s, Scheme scheme, int repeats) {
  if (repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  std::vector<double> secs;
  for (int k = 0; k < repeats; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    run_scheme(s, scheme, TrajectoryKind::kOptimized);
    secs.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(secs.begin(), secs.end());
  return secs[secs.size() / 2];
}

}  // namespace uavmec
