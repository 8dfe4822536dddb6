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

#include "core/binary_mode.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "core/error.hpp"

namespace uavmec {

ModeAssignment ModeAssignment::from_modes(const std::vector<UserMode>& modes) {
  ModeAssignment a;
  a.rho = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t m = 0; m < modes.size(); ++m) {
    if (modes[m] == UserMode::kPartial)
      throw Error(ErrorCode::kInvalidArgument, "binary assignment cannot hold a partial user");
    a.rho[m] = modes[m] == UserMode::kOffloadOnly ? 1.0 : 0.0;
  }
  return a;
}

bool ModeAssignment::is_binary() const {
  for (Eigen::Index m = 0; m < rho.size(); ++m)
    if (rho[m] != 0.0 && rho[m] != 1.0) return false;
  return true;
}

std::vector<UserMode> ModeAssignment::modes() const {
  std::vector<UserMode> out;
  for (Eigen::Index m = 0; m < rho.size(); ++m)
    out.push_back(rho[m] > 0.5 ? UserMode::kOffloadOnly : UserMode::kLocalOnly);
  return out;
}

std::vector<int> ModeAssignment::local_set() const {
  std::vector<int> out;
  for (Eigen::Index m = 0; m < rho.size(); ++m)
    if (rho[m] <= 0.5) out.push_back(static_cast<int>(m));
  return out;
}

std::vector<int> ModeAssignment::offload_set() const {
  std::vector<int> out;
  for (Eigen::Index m = 0; m < rho.size(); ++m)
    if (rho[m] > 0.5) out.push_back(static_cast<int>(m));
  return out;
}

BinaryDualState BinaryDualState::zeros(int users, int slots) {
  BinaryDualState d;
  d.upsilon = Matrix::Zero(users, slots);
  d.varpi = Matrix::Zero(users, slots);
  d.epsilon = Eigen::VectorXd::Zero(slots);
  return d;
}

void BinaryDualState::refresh_varpi() {
  varpi.resize(upsilon.rows(), upsilon.cols());
  for (Eigen::Index m = 0; m < upsilon.rows(); ++m) {
    double acc = 0.0;
    for (Eigen::Index n = upsilon.cols() - 1; n >= 0; --n) {
      acc += upsilon(m, n);
      varpi(m, n) = acc;
    }
  }
}

SelectionScores selection_scores(int m, const PrimalAllocation& a, const ChannelGains& g,
                                 const BinaryDualState& dual, const Scenario& s) {
  const auto& u = s.users[m];
  const double per_slot = static_cast<double>(s.grid.slots) / s.grid.horizon;
  SelectionScores sc;
  double local_prefix = 0.0, offload_prefix = 0.0;
  for (int n = 0; n < g.num_slots(); ++n) {
    const double f = a.f(m, n);
    local_prefix += u.capacitance_coeff * f * f * f;
    offload_prefix += a.t(m, n) * a.P(m, n);
    sc.g1 += u.weight * f / u.cpu_cycles_per_bit - dual.upsilon(m, n) * local_prefix;
    const double rate =
        a.t(m, n) > 0.0 ? u.weight * s.physics.bandwidth * a.t(m, n) / u.overhead_factor *
                              std::log2(1.0 + g.h(m, n) * a.P(m, n) / s.physics.noise_power)
                        : 0.0;
    sc.g2 += rate - dual.upsilon(m, n) * offload_prefix - per_slot * dual.epsilon[n] * a.t(m, n);
  }
  return sc;
}

UserMode select_mode(const SelectionScores& scores) {
  return scores.g1 >= scores.g2 ? UserMode::kLocalOnly : UserMode::kOffloadOnly;
}

double rho_derivative(int m, const PrimalAllocation& a, const ChannelGains& g,
                      const BinaryDualState& dual, const Scenario& s) {
  const SelectionScores sc = selection_scores(m, a, g, dual, s);
  return s.slot_len() * (sc.g2 - sc.g1);
}

std::vector<SelectionScores> candidate_scores(const ChannelGains& g, const Scenario& s,
                                              const Eigen::VectorXd& epsilon) {
  const int n_users = g.num_users();
  P2Options local;
  local.modes.assign(n_users, UserMode::kLocalOnly);
  P2Options offload;
  offload.modes.assign(n_users, UserMode::kOffloadOnly);
  offload.fixed_time_price = true;
  offload.time_price = epsilon;
  const P2Result rl = solve_p2(g, s, local);
  const P2Result ro = solve_p2(g, s, offload);
  // Each candidate already meets its own energy prefixes, so the blended
  // constraint carries no price; airtime is priced at epsilon.
  BinaryDualState priced = BinaryDualState::zeros(n_users, g.num_slots());
  priced.epsilon = epsilon;
  std::vector<SelectionScores> out(n_users);
  for (int m = 0; m < n_users; ++m) {
    out[m].g1 = selection_scores(m, rl.alloc, g, priced, s).g1;
    out[m].g2 = selection_scores(m, ro.alloc, g, priced, s).g2;
  }
  return out;
}

P6Result solve_p6_inner(const ChannelGains& g, const Scenario& s) {
  const int n_users = g.num_users();
  const int n_slots = g.num_slots();
  P6Result best;
  best.objective = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd epsilon = Eigen::VectorXd::Zero(n_slots);
  std::set<std::vector<int>> visited;
  std::vector<int> last_key;
  double prev = -std::numeric_limits<double>::infinity();

  for (int l = 1; l <= s.solver.max_mode; ++l) {
    const std::vector<SelectionScores> scores = candidate_scores(g, s, epsilon);
    std::vector<UserMode> modes(n_users);
    std::vector<int> key(n_users);
    for (int m = 0; m < n_users; ++m) {
      modes[m] = select_mode(scores[m]);
      key[m] = modes[m] == UserMode::kOffloadOnly ? 1 : 0;
    }
    best.iterations = l;
    if (!visited.insert(key).second) {
      // Repeating the last partition is a fixed point; anything else is a cycle.
      best.cycle_detected = key != last_key;
      best.converged = true;
      break;
    }
    last_key = key;

    P2Options opt;
    opt.modes = modes;
    const P2Result r = solve_p2(g, s, opt);
    best.trace.push_back(r.objective);
    if (r.objective > best.objective) {
      best.objective = r.objective;
      best.alloc = r.alloc;
      best.assignment = ModeAssignment::from_modes(modes);
      best.dual = BinaryDualState::zeros(n_users, n_slots);
      best.dual.upsilon = r.dual.lambda;
      best.dual.epsilon = r.dual.alpha;
      best.dual.refresh_varpi();
    }
    if (std::abs(r.objective - prev) <= s.solver.tol_mode) {
      best.converged = true;
      break;
    }
    prev = r.objective;
    epsilon = r.dual.alpha;
  }
  return best;
}

P6Result solve_p6_inner(const Trajectory& traj, const Scenario& s) {
  return solve_p6_inner(gains_for_trajectory(traj, s), s);
}

double evaluate_objective_binary(const PrimalAllocation& a, const ModeAssignment& assignment,
                                 const ChannelGains& g, const Scenario& s) {
  if (!assignment.is_binary())
    throw Error(ErrorCode::kInvalidArgument, "assignment is not binarized");
  const double delta = s.slot_len();
  double total = 0.0;
  for (int m = 0; m < g.num_users(); ++m) {
    const auto& u = s.users[m];
    const bool offload = assignment.rho[m] == 1.0;
    double bits = 0.0;
    for (int n = 0; n < g.num_slots(); ++n) {
      if (offload) {
        if (a.f(m, n) > 0.0)
          throw Error(ErrorCode::kModeMismatch,
                      "user " + std::to_string(m) + " offloads but has local frequency");
        bits += offload_capacity(g.h(m, n), a.P(m, n), a.t(m, n), m, s);
      } else {
        if (a.t(m, n) > 0.0)
          throw Error(ErrorCode::kModeMismatch,
                      "user " + std::to_string(m) + " computes locally but has airtime");
        bits += delta * a.f(m, n) / u.cpu_cycles_per_bit;
      }
    }
    total += u.weight * bits;
  }
  return total;
}

}  // namespace uavmec
