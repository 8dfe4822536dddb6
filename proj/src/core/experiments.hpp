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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/drivers.hpp"
#include "core/scenario.hpp"

namespace uavmec {

enum class SweepVariable { kUavPower, kNumUsers };

const char* sweep_variable_name(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& name);

// Fixed comparison path. The semicircle has the endpoints as its diameter
// and bulges toward the user centroid (toward +90 degrees when the centroid
// lies on the segment line). Error{kInfeasible} if the path breaks the speed
// limit.
Trajectory baseline_trajectory(TrajectoryKind kind, const Scenario& s);

// Single-family baseline with the trajectory still optimized.
SolveReport baseline_mode(Scheme scheme, const Scenario& s);

// One cell of the scheme x trajectory grid. Fixed trajectories skip the SCA
// stage; the optimized kind starts from the straight line.
SolveReport run_scheme(const Scenario& s, Scheme scheme, TrajectoryKind kind);

struct ExperimentResult {
  std::uint64_t fingerprint = 0;
  Scheme scheme = Scheme::kPartial;
  TrajectoryKind trajectory = TrajectoryKind::kOptimized;
  SweepVariable variable = SweepVariable::kUavPower;
  double value = 0.0;
  double objective = 0.0;
  std::vector<double> user_bits;
  int outer_iterations = 0;
  bool converged = false;
  double wall_s = 0.0;
  std::string error;  // empty on success

  bool operator==(const ExperimentResult&) const = default;
};

struct SweepOptions {
  std::vector<Scheme> schemes;
  std::vector<TrajectoryKind> trajectories{TrajectoryKind::kOptimized};
  int workers = 1;
};

// One row per (scheme, trajectory, value), ordered by that key regardless of
// completion order. Per-row failures are recorded in the row.
std::vector<ExperimentResult> sweep(const Scenario& base, SweepVariable variable,
                                    const std::vector<double>& values, const SweepOptions& opt);

// Scheme x trajectory grid on one scenario, same ordering rules.
std::vector<ExperimentResult> compare(const Scenario& s, const std::vector<Scheme>& schemes,
                                      const std::vector<TrajectoryKind>& kinds, int workers);

// Columns: scheme,variable,value,objective_bits,user_bits_1..user_bits_K,
// outer_iters,wall_s,trajectory,converged,fingerprint,error with K the
// largest user count among the rows. wall_s is written as 0 unless
// include_timings is set.
std::string results_csv(const std::vector<ExperimentResult>& rows, bool include_timings);
std::vector<ExperimentResult> parse_results_csv(const std::string& text);

// Columns: iter,slot,x,y over the recorded trajectory trace.
std::string trajectory_csv(const SolveReport& r);

std::string trajectory_svg(const SolveReport& r, const Scenario& s);
std::string sweep_svg(const std::vector<ExperimentResult>& rows);

void write_text_file(const std::string& path, const std::string& text);

// Median wall-clock of `repeats` runs of the scheme on an optimized path.
double measure_runtime(const Scenario& s, Scheme scheme, int repeats);

}  // namespace uavmec
