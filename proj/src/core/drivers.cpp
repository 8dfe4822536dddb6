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

#include "core/drivers.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/trajectory_sca.hpp"
#include "json.hpp"

namespace uavmec {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void push_trace(SolveReport& r, double value, const Trajectory& q) {
  r.objective_trace.push_back(value);
  r.best_trace.push_back(r.best_trace.empty() ? value : std::max(r.best_trace.back(), value));
  r.trajectory_trace.push_back(q);
}

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kPartial: return "partial";
    case Scheme::kBinary: return "binary";
    case Scheme::kLocalOnly: return "local_only";
    case Scheme::kOffloadOnly: return "offload_only";
  }
  return "partial";
}

const char* trajectory_name(TrajectoryKind k) {
  switch (k) {
    case TrajectoryKind::kOptimized: return "optimized";
    case TrajectoryKind::kStraightLine: return "straight_line";
    case TrajectoryKind::kSemicircle: return "semicircle";
  }
  return "optimized";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::kPartial, Scheme::kBinary, Scheme::kLocalOnly, Scheme::kOffloadOnly})
    if (name == scheme_name(s)) return s;
  throw Error(ErrorCode::kInvalidArgument, "unknown scheme: " + name);
}

TrajectoryKind parse_trajectory(const std::string& name) {
  for (TrajectoryKind k : {TrajectoryKind::kOptimized, TrajectoryKind::kStraightLine,
                           TrajectoryKind::kSemicircle})
    if (name == trajectory_name(k)) return k;
  throw Error(ErrorCode::kInvalidArgument, "unknown trajectory kind: " + name);
}

Trajectory straight_line_trajectory(const Scenario& s) {
  Trajectory t;
  const int n_slots = s.num_slots();
  for (int n = 0; n <= n_slots; ++n)
    t.waypoints.push_back(s.uav.start + (s.uav.end - s.uav.start) * (double(n) / n_slots));
  t.waypoints.back() = s.uav.end;
  return t;
}

SolveReport algorithm1(const Scenario& s, const std::optional<Trajectory>& initial,
                       bool optimize_trajectory, const std::vector<UserMode>& modes) {
  validate_scenario(s);
  const auto t_start = Clock::now();
  SolveReport rep;
  rep.scheme = Scheme::kPartial;
  if (!modes.empty()) {
    bool all_local = true, all_offload = true;
    for (UserMode m : modes) {
      all_local = all_local && m == UserMode::kLocalOnly;
      all_offload = all_offload && m == UserMode::kOffloadOnly;
    }
    if (all_local) rep.scheme = Scheme::kLocalOnly;
    if (all_offload) rep.scheme = Scheme::kOffloadOnly;
  }
  Trajectory q = initial ? *initial : straight_line_trajectory(s);
  if (!trajectory_feasible(q, s, 1e-9))
    throw Error(ErrorCode::kInfeasible, "initial trajectory violates the flight constraints");
  P2Options opt;
  opt.modes = modes;
  const ModeWeights weights = ModeWeights::partial(s.num_users());

  double prev = -std::numeric_limits<double>::infinity();
  double best = prev;
  for (int i = 1; i <= s.solver.max_outer; ++i) {
    auto t0 = Clock::now();
    const ChannelGains g = gains_for_trajectory(q, s);
    const P2Result r = solve_p2(g, s, opt);
    rep.times.allocation_s += seconds_since(t0);
    rep.outer_iterations = i;
    rep.inner_iterations.push_back(r.iterations);
    push_trace(rep, r.objective, q);
    if (r.objective > best) {
      best = r.objective;
      rep.objective = r.objective;
      rep.alloc = r.alloc;
      rep.traj = q;
      rep.gains = g;
    }
    if (std::abs(r.objective - prev) <= s.solver.tol_outer || !optimize_trajectory) {
      rep.sca_iterations.push_back(0);
      rep.converged = true;
      break;
    }
    prev = r.objective;
    if (i == s.solver.max_outer) {
      rep.sca_iterations.push_back(0);
      rep.cap_hit = true;
      break;
    }
    t0 = Clock::now();
    const ScaResult sca = sca_trajectory_loop(q, r.alloc, s, weights);
    rep.times.trajectory_s += seconds_since(t0);
    rep.sca_iterations.push_back(sca.iterations);
    q = sca.traj;
  }
  rep.user_bits = per_user_bits(rep.alloc, rep.gains, s);
  rep.times.total_s = seconds_since(t_start);
  return rep;
}

SolveReport algorithm2(const Scenario& s, const std::optional<Trajectory>& initial,
                       bool optimize_trajectory) {
  validate_scenario(s);
  const auto t_start = Clock::now();
  SolveReport rep;
  rep.scheme = Scheme::kBinary;
  Trajectory q = initial ? *initial : straight_line_trajectory(s);
  if (!trajectory_feasible(q, s, 1e-9))
    throw Error(ErrorCode::kInfeasible, "initial trajectory violates the flight constraints");

  double prev = -std::numeric_limits<double>::infinity();
  double best = prev;
  for (int i = 1; i <= s.solver.max_outer; ++i) {
    auto t0 = Clock::now();
    const ChannelGains g = gains_for_trajectory(q, s);
    const P6Result r = solve_p6_inner(g, s);
    rep.times.allocation_s += seconds_since(t0);
    rep.outer_iterations = i;
    rep.inner_iterations.push_back(r.iterations);
    push_trace(rep, r.objective, q);
    if (r.objective > best) {
      best = r.objective;
      rep.objective = r.objective;
      rep.alloc = r.alloc;
      rep.traj = q;
      rep.gains = g;
      rep.assignment = r.assignment;
    }
    if (std::abs(r.objective - prev) <= s.solver.tol_outer || !optimize_trajectory) {
      rep.sca_iterations.push_back(0);
      rep.converged = true;
      break;
    }
    prev = r.objective;
    if (i == s.solver.max_outer) {
      rep.sca_iterations.push_back(0);
      rep.cap_hit = true;
      break;
    }
    t0 = Clock::now();
    const ScaResult sca =
        sca_trajectory_loop(q, r.alloc, s, ModeWeights::binary(r.assignment.rho));
    rep.times.trajectory_s += seconds_since(t0);
    rep.sca_iterations.push_back(sca.iterations);
    q = sca.traj;
  }
  rep.user_bits = per_user_bits(rep.alloc, rep.gains, s);
  rep.times.total_s = seconds_since(t_start);
  return rep;
}

std::string report_to_json(const SolveReport& r, const Scenario& s, bool include_timings) {
  nlohmann::json j;
  j["scheme"] = scheme_name(r.scheme);
  j["objective_bits"] = r.objective;
  j["objective_trace"] = r.objective_trace;
  j["best_trace"] = r.best_trace;
  j["outer_iterations"] = r.outer_iterations;
  j["inner_iterations"] = r.inner_iterations;
  j["sca_iterations"] = r.sca_iterations;
  j["converged"] = r.converged;
  j["cap_hit"] = r.cap_hit;
  j["scenario_fingerprint"] = scenario_fingerprint(s);
  std::vector<double> bits(r.user_bits.data(), r.user_bits.data() + r.user_bits.size());
  j["user_bits"] = bits;
  nlohmann::json path = nlohmann::json::array();
  for (const auto& w : r.traj.waypoints) path.push_back({w.x(), w.y()});
  j["trajectory"] = path;
  j["allocation"] = {{"cpu_freq_hz", matrix_json(r.alloc.f)},
                     {"offload_power_w", matrix_json(r.alloc.P)},
                     {"time_share", matrix_json(r.alloc.t)}};
  if (r.assignment) {
    std::vector<double> rho(r.assignment->rho.data(),
                            r.assignment->rho.data() + r.assignment->rho.size());
    j["rho"] = rho;
  }
  if (include_timings)
    j["timings_s"] = {{"allocation", r.times.allocation_s},
                      {"trajectory", r.times.trajectory_s},
                      {"total", r.times.total_s}};
  return j.dump(2);
}

}  // namespace uavmec
