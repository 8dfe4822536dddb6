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
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "core/channel.hpp"
#include "core/scenario.hpp"

// Brute-force references for toy instances. Nothing here calls into the
// allocation, mode-selection or trajectory solvers.
namespace uavmec::oracle {

enum class Family { kBoth, kLocal, kOffload };

// Per-user cumulative energy is quantized to energy_levels steps of the
// user's total harvest; slot energy is split on split_levels + 1 points and
// airtime on time_levels + 1 points. Doubling any count nests the grid.
struct GridSpec {
  int energy_levels = 64;
  int time_levels = 16;
  int split_levels = 128;
  std::int64_t budget = 100000000;  // evaluations
};

struct GridAllocation {
  Eigen::MatrixXd f, P, t, z;
};

struct GridResult {
  GridAllocation alloc;
  double objective = 0.0;
  double cell_slack = 0.0;  // value of one extra energy step per user and slot
  std::int64_t evaluations = 0;
};

// Throws Error{kBudget} when the grid exceeds the budget and
// Error{kInvalidArgument} outside the toy limits (M <= 4, N <= 4).
GridResult grid_search_p2(const Scenario& s, const ChannelGains& g, const GridSpec& grid,
                          const std::vector<Family>& families = {});

struct PartitionResult {
  std::vector<int> offload;  // 1 for users in the offloading set
  double objective = 0.0;
  std::vector<double> all_objectives;  // indexed by the partition bitmask
};

PartitionResult enumerate_partitions_binary(const Scenario& s, const ChannelGains& g,
                                            const GridSpec& grid);

// Central-difference gradient.
Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& fn,
                                           const Eigen::VectorXd& x, double step);

// Lagrangian of the partial problem at (f, z, t) with energy multipliers
// lambda (M x N) and airtime multipliers alpha (N).
double partial_lagrangian(const Scenario& s, const ChannelGains& g, const Eigen::MatrixXd& f,
                          const Eigen::MatrixXd& z, const Eigen::MatrixXd& t,
                          const Eigen::MatrixXd& lambda, const Eigen::VectorXd& alpha);

// Analytic partial derivatives of the same Lagrangian in f(m, n) and z(m, n).
double partial_lagrangian_df(const Scenario& s, const Eigen::MatrixXd& f,
                             const Eigen::MatrixXd& lambda, int m, int n);
double partial_lagrangian_dz(const Scenario& s, const ChannelGains& g, const Eigen::MatrixXd& z,
                             const Eigen::MatrixXd& t, const Eigen::MatrixXd& lambda, int m,
                             int n);

// Lagrangian of the relaxed binary problem at sharing factors rho, and its
// analytic derivative in rho_m.
double binary_lagrangian(const Scenario& s, const ChannelGains& g, const Eigen::VectorXd& rho,
                         const Eigen::MatrixXd& f, const Eigen::MatrixXd& z,
                         const Eigen::MatrixXd& t, const Eigen::MatrixXd& upsilon,
                         const Eigen::VectorXd& epsilon);
double binary_lagrangian_drho(const Scenario& s, const ChannelGains& g, const Eigen::MatrixXd& f,
                              const Eigen::MatrixXd& z, const Eigen::MatrixXd& t,
                              const Eigen::MatrixXd& upsilon, const Eigen::VectorXd& epsilon,
                              int m);

struct TrajectoryGridResult {
  Trajectory traj;
  double value = 0.0;  // weighted rate minorant at the best point
  std::int64_t evaluations = 0;
};

// Exhaustive search of the linearized trajectory subproblem for N <= 3 over
// a square window of half-width `radius` around each base waypoint.
TrajectoryGridResult grid_search_trajectory(const Scenario& s, const Trajectory& base,
                                            const Eigen::MatrixXd& f, const Eigen::MatrixXd& P,
                                            const Eigen::MatrixXd& t, double pitch,
                                            double radius, std::int64_t budget = 100000000);

// Surrogate value used by grid_search_trajectory, for comparing a candidate.
double trajectory_surrogate(const Scenario& s, const Trajectory& base, const Trajectory& cand,
                            const Eigen::MatrixXd& P, const Eigen::MatrixXd& t);

}  // namespace uavmec::oracle
