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

#include <vector>

#include <Eigen/Core>

#include "core/barrier.hpp"
#include "core/channel.hpp"
#include "core/partial_alloc.hpp"
#include "core/scenario.hpp"

namespace uavmec {

// Tangent data around the expansion trajectory; all M x N, slot-aligned.
struct LinearizationPoint {
  Trajectory base;
  Matrix dist2;  // |q_base[n] - u_m|^2
  Matrix gain;   // exact gain at the base
};

// Per-user weights on the two consumption/rate families: all ones for the
// partial mode, (1 - rho, rho) for the relaxed binary mode.
struct ModeWeights {
  Eigen::VectorXd local;
  Eigen::VectorXd offload;

  static ModeWeights partial(int users);
  static ModeWeights binary(const Eigen::VectorXd& rho);
};

struct TrajectorySubproblem {
  LinearizationPoint lin;
  QcqpProblem qp;
  Matrix rate_coeff;  // c(m, n) >= 0: objective = const - sum c * dist2
  bool trivial = false;  // no rate coefficient is positive
};

struct SubproblemResult {
  Trajectory traj;
  bool feasible_start = true;
  bool converged = true;
  bool moved = false;
  double base_value = 0.0;  // surrogate rate term at the base
  double value = 0.0;       // surrogate rate term at the result
};

struct ScaResult {
  Trajectory traj;
  std::vector<double> objective_trace;  // true objective, index 0 is the start
  std::vector<Trajectory> iterates;
  int iterations = 0;
  bool converged = false;
};

LinearizationPoint make_linearization(const Trajectory& base, const Scenario& s);

// beta0 P0 times the tangent minorant of sum_{i<=n} 1/(H^2 + s_i); n is 1-based.
double energy_lower_bound(const LinearizationPoint& lin, const Trajectory& cand, int m, int n,
                          const Scenario& s);
double energy_exact(const Trajectory& cand, int m, int n, const Scenario& s);

// Tangent minorant of log2(1 + h P / sigma^2) at slot n (0-based).
double rate_lower_bound(const LinearizationPoint& lin, const Trajectory& cand, int m, int n,
                        double power, const Scenario& s);
double rate_exact(const Trajectory& cand, int m, int n, double power, const Scenario& s);

// Objective for a fixed allocation on a candidate trajectory, weighted bits.
double trajectory_objective(const Trajectory& traj, const PrimalAllocation& a,
                            const Scenario& s, const ModeWeights& w);

TrajectorySubproblem build_subproblem(const LinearizationPoint& lin, const PrimalAllocation& a,
                                      const Scenario& s, const ModeWeights& w);
SubproblemResult solve_trajectory_subproblem(const TrajectorySubproblem& sub,
                                             const Scenario& s);

ScaResult sca_trajectory_loop(const Trajectory& initial, const PrimalAllocation& a,
                              const Scenario& s, const ModeWeights& w);

}  // namespace uavmec
