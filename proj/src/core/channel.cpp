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

#include "core/channel.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "core/error.hpp"

namespace uavmec {

std::uint64_t Trajectory::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& w : waypoints) {
    for (double c : {w.x(), w.y()}) {
      std::uint64_t bits;
      std::memcpy(&bits, &c, sizeof bits);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffu;
        h *= 1099511628211ull;
      }
    }
  }
  return h ^ waypoints.size();
}

double channel_gain(const Vec2& uav_pos, const Vec2& user_pos,
                    const PhysicsSpec& physics, double altitude) {
  return physics.ref_gain / (altitude * altitude + (uav_pos - user_pos).squaredNorm());
}

ChannelGains gains_for_trajectory(const Trajectory& traj, const Scenario& s) {
  const int n_slots = s.num_slots();
  if (traj.num_slots() != n_slots) {
    throw Error(ErrorCode::kInvalidArgument,
                "trajectory has " + std::to_string(traj.waypoints.size()) +
                    " waypoints, expected " + std::to_string(n_slots + 1));
  }
  ChannelGains g;
  g.h.resize(s.num_users(), n_slots);
  for (int m = 0; m < s.num_users(); ++m)
    for (int n = 0; n < n_slots; ++n)
      g.h(m, n) = channel_gain(traj.waypoints[n], s.users[m].position, s.physics,
                               s.uav.altitude);
  g.trajectory_fingerprint = traj.fingerprint();
  return g;
}

double harvested_energy_prefix(const ChannelGains& g, const Scenario& s, int m, int n) {
  if (m < 0 || m >= g.num_users() || n < 1 || n > g.num_slots())
    throw Error(ErrorCode::kInvalidArgument, "harvested_energy_prefix: index out of range");
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += g.h(m, k);
  return s.slot_len() * s.physics.eh_efficiency * s.uav.tx_power * sum;
}

double offload_capacity(double gain, double power, double time_share, int m,
                        const Scenario& s) {
  if (time_share <= 0.0 || power <= 0.0) return 0.0;
  const auto& u = s.users[m];
  return s.physics.bandwidth * s.grid.horizon * time_share /
         (u.overhead_factor * s.grid.slots) *
         std::log2(1.0 + gain * power / s.physics.noise_power);
}

double consumed_energy_prefix(const Matrix& f, const Matrix& z, const Scenario& s,
                              int m, int n) {
  if (m < 0 || m >= f.rows() || n < 1 || n > f.cols())
    throw Error(ErrorCode::kInvalidArgument, "consumed_energy_prefix: index out of range");
  const double gamma = s.users[m].capacitance_coeff;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += gamma * f(m, k) * f(m, k) * f(m, k) + z(m, k);
  return s.slot_len() * sum;
}

bool trajectory_feasible(const Trajectory& traj, const Scenario& s, double slack) {
  if (traj.num_slots() != s.num_slots()) return false;
  if (traj.waypoints.front() != s.uav.start || traj.waypoints.back() != s.uav.end) return false;
  for (std::size_t i = 0; i + 1 < traj.waypoints.size(); ++i)
    if (!s.step_ok(traj.waypoints[i], traj.waypoints[i + 1], slack)) return false;
  return true;
}

}  // namespace uavmec
