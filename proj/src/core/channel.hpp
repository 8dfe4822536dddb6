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
#include <vector>

#include <Eigen/Core>

#include "core/scenario.hpp"

namespace uavmec {

using Matrix = Eigen::MatrixXd;

// Waypoint n (0-based) is the UAV position during slot n; the last waypoint
// is the terminal position and belongs to no slot.
struct Trajectory {
  std::vector<Vec2> waypoints;

  int num_slots() const { return static_cast<int>(waypoints.size()) - 1; }
  std::uint64_t fingerprint() const;
};

// M x N linear gains tied to the trajectory they were computed from.
struct ChannelGains {
  Matrix h;
  std::uint64_t trajectory_fingerprint = 0;

  int num_users() const { return static_cast<int>(h.rows()); }
  int num_slots() const { return static_cast<int>(h.cols()); }
  bool matches(const Trajectory& t) const {
    return trajectory_fingerprint == t.fingerprint();
  }
};

double channel_gain(const Vec2& uav_pos, const Vec2& user_pos,
                    const PhysicsSpec& physics, double altitude);

// Throws Error{kInvalidArgument} when the waypoint count is not N+1.
ChannelGains gains_for_trajectory(const Trajectory& traj, const Scenario& s);

// Energy harvested by user m through the end of slot n (1-based, joules).
double harvested_energy_prefix(const ChannelGains& g, const Scenario& s, int m, int n);

double offload_capacity(double gain, double power, double time_share, int m,
                        const Scenario& s);

// Energy spent by user m through slot n (1-based, joules); z = t * P.
double consumed_energy_prefix(const Matrix& f, const Matrix& z, const Scenario& s,
                              int m, int n);

// Straight-line check of the endpoint pins and per-step speed budget.
bool trajectory_feasible(const Trajectory& traj, const Scenario& s, double slack = 1e-12);

}  // namespace uavmec
