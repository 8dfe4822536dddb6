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

#include <doctest.h>

#include <cmath>
#include <random>

#include "core/channel.hpp"
#include "core/drivers.hpp"
#include "core/error.hpp"

using namespace uavmec;

namespace {

Trajectory hover(const Scenario& s, const Vec2& at) {
  Trajectory t;
  t.waypoints.assign(s.num_slots() + 1, at);
  return t;
}

Scenario hover_scenario() {
  Scenario s = default_paper_scenario();
  s.uav.end = s.uav.start;
  return s;
}

}  // namespace

TEST_CASE("channel gain follows the inverse-square law") {
  const Scenario s = default_paper_scenario();
  CHECK(channel_gain(Vec2(0, 0), Vec2(0, 0), s.physics, s.uav.altitude) ==
        doctest::Approx(1e-7).epsilon(1e-15));
  CHECK(channel_gain(Vec2(0, 0), Vec2(10, 0), s.physics, s.uav.altitude) ==
        doctest::Approx(5e-8).epsilon(1e-15));
  double prev = 1.0;
  for (double d = 0.0; d < 30.0; d += 0.5) {
    const double g = channel_gain(Vec2(d, 0), Vec2(0, 0), s.physics, s.uav.altitude);
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("gains over a trajectory") {
  const Scenario s = hover_scenario();
  const Trajectory t = hover(s, s.users[0].position);
  const ChannelGains g = gains_for_trajectory(t, s);
  CHECK(g.matches(t));
  for (int n = 0; n < s.num_slots(); ++n) CHECK(g.h(0, n) == doctest::Approx(1e-7).epsilon(1e-15));
  const ChannelGains line = gains_for_trajectory(straight_line_trajectory(default_paper_scenario()),
                                                 default_paper_scenario());
  CHECK(line.h.maxCoeff() <= 1e-7 * (1.0 + 1e-15));
  CHECK(line.h.minCoeff() > 0.0);

  // Permuting users permutes rows.
  Scenario swapped = default_paper_scenario();
  std::swap(swapped.users[0], swapped.users[2]);
  const ChannelGains gs = gains_for_trajectory(straight_line_trajectory(swapped), swapped);
  CHECK((gs.h.row(0) - line.h.row(2)).norm() == 0.0);
  CHECK((gs.h.row(2) - line.h.row(0)).norm() == 0.0);

  Trajectory moved = t;
  moved.waypoints[3] += Vec2(0.1, 0);
  CHECK_FALSE(g.matches(moved));
  Trajectory shorter = t;
  shorter.waypoints.pop_back();
  CHECK_THROWS_AS(gains_for_trajectory(shorter, s), Error);
}

TEST_CASE("harvested energy prefix") {
  Scenario s = hover_scenario();
  const ChannelGains g = gains_for_trajectory(hover(s, s.users[0].position), s);
  CHECK(harvested_energy_prefix(g, s, 0, 1) == doctest::Approx(3.2e-10).epsilon(1e-12));
  CHECK(harvested_energy_prefix(g, s, 0, 50) == doctest::Approx(1.6e-8).epsilon(1e-12));
  const Scenario line_s = default_paper_scenario();
  const ChannelGains lg = gains_for_trajectory(straight_line_trajectory(line_s), line_s);
  for (int n = 2; n <= 50; ++n) {
    const double step = harvested_energy_prefix(lg, line_s, 2, n) -
                        harvested_energy_prefix(lg, line_s, 2, n - 1);
    CHECK(step == doctest::Approx(0.04 * 0.8 * 0.1 * lg.h(2, n - 1)).epsilon(1e-12));
  }
  s.uav.tx_power = 0.0;
  for (int n = 1; n <= 50; ++n) CHECK(harvested_energy_prefix(g, s, 0, n) == 0.0);
  CHECK_THROWS_AS(harvested_energy_prefix(g, s, 0, 0), Error);
}

TEST_CASE("offload capacity") {
  const Scenario s = default_paper_scenario();
  CHECK(offload_capacity(1e-7, 0.01, 0.0, 0, s) == 0.0);
  CHECK(offload_capacity(1e-7, 0.01, 1.0, 0, s) == doctest::Approx(1.4545454545e6).epsilon(1e-9));
  Scenario doubled = s;
  doubled.users[0].overhead_factor = 2.2;
  CHECK(offload_capacity(1e-7, 0.01, 1.0, 0, doubled) ==
        doctest::Approx(0.5 * offload_capacity(1e-7, 0.01, 1.0, 0, s)));
  // Concave and nondecreasing in power, nondecreasing in time share.
  double prev = 0.0, prev_slope = 1e300;
  for (int k = 1; k <= 200; ++k) {
    const double p = 1e-4 * k;
    const double c = offload_capacity(1e-7, p, 0.7, 1, s);
    CHECK(c >= prev);
    CHECK(c - prev <= prev_slope * (1 + 1e-12));
    prev_slope = c - prev;
    prev = c;
  }
  for (int k = 1; k <= 10; ++k)
    CHECK(offload_capacity(1e-7, 0.01, 0.1 * k, 1, s) >=
          offload_capacity(1e-7, 0.01, 0.1 * (k - 1), 1, s));
}

TEST_CASE("consumed energy and trajectory feasibility") {
  const Scenario s = default_paper_scenario();
  Matrix f = Matrix::Constant(4, 50, 1e6);
  Matrix z = Matrix::Constant(4, 50, 1e-9);
  const double per_slot = 1e-28 * 1e18 + 1e-9;
  CHECK(consumed_energy_prefix(f, z, s, 1, 10) == doctest::Approx(0.04 * 10 * per_slot));
  CHECK(trajectory_feasible(straight_line_trajectory(s), s));
  Trajectory jump = straight_line_trajectory(s);
  jump.waypoints[5] += Vec2(0, 2.0);
  CHECK_FALSE(trajectory_feasible(jump, s));
  Trajectory wrong_end = straight_line_trajectory(s);
  wrong_end.waypoints.back() = Vec2(9.9, 0);
  CHECK_FALSE(trajectory_feasible(wrong_end, s));
}
