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
#include "core/scenario.hpp"

namespace uavmec {

enum class UserMode { kPartial, kLocalOnly, kOffloadOnly };

// All matrices are M x N. z = t * P, with P = 0 wherever t = 0.
struct PrimalAllocation {
  Matrix f;
  Matrix P;
  Matrix t;
  Matrix z;

  static PrimalAllocation zeros(int users, int slots);
};

// lambda and mu are M x N; mu(m, n) = sum_{k >= n} lambda(m, k).
struct DualState {
  Matrix lambda;
  Eigen::VectorXd alpha;
  Matrix mu;

  static DualState zeros(int users, int slots);
  void refresh_mu();
};

struct P2Options {
  std::vector<UserMode> modes;  // empty means every user is partial
  // When set, alpha is a given price per slot and the shared time budget is
  // dropped; each user is then solved independently with t <= 1.
  bool fixed_time_price = false;
  Eigen::VectorXd time_price;
};

struct P2Result {
  PrimalAllocation alloc;
  DualState dual;
  double objective = 0.0;   // weighted bits of alloc
  double dual_value = 0.0;  // +inf when some price is zero on an unbounded term
  int iterations = 0;
  bool converged = false;
};

struct StepSchedule {
  double theta_lambda0 = 0.0;
  double theta_alpha0 = 0.0;
};

struct StationarityResiduals {
  double frequency = 0.0;  // max relative residual where f > 0
  double power = 0.0;      // max relative residual where z > 0
};

// Closed-form responses; throw Error{kInvalidArgument} on mu <= 0.
double optimal_cpu_frequency(double weight, double cycles_per_bit, double gamma, double mu);
double optimal_cpu_frequency(int m, int n, const DualState& dual, const Scenario& s);
double optimal_offload_power(int m, int n, const DualState& dual, double gain, const Scenario& s);

// phi(x) = log2(1+x) - x / (ln2 (1+x)); increasing, phi(0) = 0.
double phi(double x);
double phi_inverse(double c);

// Root in t of the time-share stationarity equation; 0 when z = 0, 1 when
// the root lies beyond the unit budget.
double offload_time_root(int m, int n, double z, double gain, double alpha_n,
                         const Scenario& s);

DualState subgradient_step(const DualState& dual, const PrimalAllocation& primal,
                           const ChannelGains& gains, const Scenario& s, int iteration,
                           const StepSchedule& schedule);

// Weighted bits of an allocation, and the unweighted per-user split.
double evaluate_objective_partial(const PrimalAllocation& a, const ChannelGains& g,
                                  const Scenario& s);
Eigen::VectorXd per_user_bits(const PrimalAllocation& a, const ChannelGains& g,
                              const Scenario& s);

// Lagrangian dual function at the given multipliers.
double dual_function_value(const DualState& dual, const ChannelGains& g, const Scenario& s,
                           const P2Options& opt = {});

// Per-user multiplicative back-off on f^3 and z, then per-slot t renormalization.
PrimalAllocation restore_feasibility(const PrimalAllocation& a, const ChannelGains& g,
                                     const Scenario& s);

StationarityResiduals stationarity_residuals(const PrimalAllocation& a, const DualState& d,
                                             const ChannelGains& g, const Scenario& s);

// Worst relative energy-causality slack; negative means violation.
double energy_slack(const PrimalAllocation& a, const ChannelGains& g, const Scenario& s);

P2Result solve_p2(const ChannelGains& g, const Scenario& s, const P2Options& opt = {});
P2Result solve_p2(const Trajectory& traj, const Scenario& s, const P2Options& opt = {});

}  // namespace uavmec
