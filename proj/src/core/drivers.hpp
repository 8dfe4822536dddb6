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

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "core/binary_mode.hpp"
#include "core/channel.hpp"
#include "core/partial_alloc.hpp"
#include "core/scenario.hpp"

namespace uavmec {

enum class Scheme { kPartial, kBinary, kLocalOnly, kOffloadOnly };
enum class TrajectoryKind { kOptimized, kStraightLine, kSemicircle };

const char* scheme_name(Scheme s);
const char* trajectory_name(TrajectoryKind k);
Scheme parse_scheme(const std::string& name);
TrajectoryKind parse_trajectory(const std::string& name);

struct StageTimes {
  double allocation_s = 0.0;
  double trajectory_s = 0.0;
  double total_s = 0.0;
};

struct SolveReport {
  Scheme scheme = Scheme::kPartial;
  std::vector<double> objective_trace;  // R^i per outer iteration
  std::vector<double> best_trace;       // running maximum of the trace
  std::vector<Trajectory> trajectory_trace;  // trajectory evaluated at iteration i
  std::vector<int> inner_iterations;    // dual or mode loop, per outer iteration
  std::vector<int> sca_iterations;      // per outer iteration (0 when skipped)
  PrimalAllocation alloc;
  Trajectory traj;
  ChannelGains gains;
  std::optional<ModeAssignment> assignment;
  double objective = 0.0;
  Eigen::VectorXd user_bits;  // unweighted, per user
  int outer_iterations = 0;
  bool converged = false;
  bool cap_hit = false;
  StageTimes times;
};

Trajectory straight_line_trajectory(const Scenario& s);

// Two-stage alternation of P2 and the SCA trajectory loop. `modes` pins
// users to one family (the single-mode baselines); empty means partial.
SolveReport algorithm1(const Scenario& s, const std::optional<Trajectory>& initial = {},
                       bool optimize_trajectory = true,
                       const std::vector<UserMode>& modes = {});

// Three-stage alternation: allocation and mode selection, then SCA on P7.
SolveReport algorithm2(const Scenario& s, const std::optional<Trajectory>& initial = {},
                       bool optimize_trajectory = true);

// Report as a JSON document; timings are left out unless requested so that
// identical runs produce identical bytes.
std::string report_to_json(const SolveReport& r, const Scenario& s, bool include_timings);

}  // namespace uavmec
