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

#include "core/channel.hpp"
#include "core/partial_alloc.hpp"
#include "core/scenario.hpp"

namespace uavmec {

// rho(m) = 0 computes locally, 1 offloads; interior values only while relaxed.
struct ModeAssignment {
  Eigen::VectorXd rho;

  static ModeAssignment from_modes(const std::vector<UserMode>& modes);
  bool is_binary() const;
  std::vector<UserMode> modes() const;  // rho <= 0.5 maps to local
  std::vector<int> local_set() const;
  std::vector<int> offload_set() const;
};

// upsilon and varpi are M x N with varpi(m, n) = sum_{k >= n} upsilon(m, k).
struct BinaryDualState {
  Matrix upsilon;
  Matrix varpi;
  Eigen::VectorXd epsilon;

  static BinaryDualState zeros(int users, int slots);
  void refresh_varpi();
};

struct SelectionScores {
  double g1 = 0.0;  // local: rate minus energy cost
  double g2 = 0.0;  // offload: rate minus energy and airtime cost
};

SelectionScores selection_scores(int m, const PrimalAllocation& a, const ChannelGains& g,
                                 const BinaryDualState& dual, const Scenario& s);

// Local iff g1 >= g2.
UserMode select_mode(const SelectionScores& scores);

// Derivative of the relaxed Lagrangian in rho_m; equals slot_len * (g2 - g1).
double rho_derivative(int m, const PrimalAllocation& a, const ChannelGains& g,
                      const BinaryDualState& dual, const Scenario& s);

struct P6Result {
  ModeAssignment assignment;
  PrimalAllocation alloc;
  BinaryDualState dual;
  double objective = 0.0;
  std::vector<double> trace;  // restricted objective per inner iteration
  int iterations = 0;
  bool converged = false;
  bool cycle_detected = false;
};

// Per-user best response under airtime prices: candidate scores from a
// local-only solve and an offload-only solve priced at epsilon.
std::vector<SelectionScores> candidate_scores(const ChannelGains& g, const Scenario& s,
                                              const Eigen::VectorXd& epsilon);

P6Result solve_p6_inner(const ChannelGains& g, const Scenario& s);
P6Result solve_p6_inner(const Trajectory& traj, const Scenario& s);

// Throws Error{kModeMismatch} if an offloading user computes locally or a
// local user is given airtime.
double evaluate_objective_binary(const PrimalAllocation& a, const ModeAssignment& assignment,
                                 const ChannelGains& g, const Scenario& s);

}  // namespace uavmec
