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
#include "core/oracle.hpp"
#include "core/verification.hpp"

using namespace uavmec;

namespace {

Scenario tiny(int users, int slots, std::uint32_t seed) {
  std::mt19937 rng(seed);
  return toy_scenario(users, slots, rng);
}

ChannelGains straight_gains(const Scenario& s) {
  return gains_for_trajectory(straight_line_trajectory(s), s);
}

// Weighted bits of an oracle allocation, recomputed from its parts.
double bits_of(const oracle::GridAllocation& a, const ChannelGains& g, const Scenario& s) {
  double total = 0.0;
  for (int m = 0; m < s.num_users(); ++m)
    for (int n = 0; n < s.num_slots(); ++n)
      total += s.users[m].weight * (s.slot_len() * a.f(m, n) / s.users[m].cpu_cycles_per_bit +
                                    offload_capacity(g.h(m, n), a.P(m, n), a.t(m, n), m, s));
  return total;
}

}  // namespace

TEST_CASE("single slot local user reaches the full-harvest frequency") {
  Scenario s = tiny(1, 1, 4);
  const ChannelGains g = straight_gains(s);
  const oracle::GridResult r = oracle::grid_search_p2(s, g, {}, {oracle::Family::kLocal});
  const auto& u = s.users[0];
  const double harvest = s.physics.eh_efficiency * s.uav.tx_power * g.h(0, 0);
  const double f = std::cbrt(harvest / u.capacitance_coeff);
  CHECK(r.objective == doctest::Approx(u.weight * s.slot_len() * f / u.cpu_cycles_per_bit).epsilon(1e-12));
  CHECK(r.alloc.t.maxCoeff() == 0.0);
}

TEST_CASE("no transmit power gives zero") {
  Scenario s = tiny(2, 2, 5);
  s.uav.tx_power = 0.0;
  const oracle::GridResult r = oracle::grid_search_p2(s, straight_gains(s), {});
  CHECK(r.objective == 0.0);
}

TEST_CASE("grid allocations are feasible and self-consistent") {
  for (std::uint32_t seed = 1; seed <= 4; ++seed) {
    const Scenario s = tiny(2, 3, seed);
    const ChannelGains g = straight_gains(s);
    const oracle::GridResult r = oracle::grid_search_p2(s, g, {});
    CHECK(r.objective == doctest::Approx(bits_of(r.alloc, g, s)).epsilon(1e-10));
    CHECK(r.cell_slack >= 0.0);
    CHECK(r.evaluations > 0);
    for (int n = 0; n < 3; ++n) CHECK(r.alloc.t.col(n).sum() <= 1.0 + 1e-12);
    for (int m = 0; m < 2; ++m)
      for (int n = 1; n <= 3; ++n)
        CHECK(consumed_energy_prefix(r.alloc.f, r.alloc.z, s, m, n) <=
              harvested_energy_prefix(g, s, m, n) * (1.0 + 1e-12));
  }
}

TEST_CASE("refining the grid never lowers the optimum") {
  for (std::uint32_t seed = 7; seed <= 9; ++seed) {
    const Scenario s = tiny(2, 2, seed);
    const ChannelGains g = straight_gains(s);
    oracle::GridSpec coarse;
    coarse.energy_levels = 16;
    coarse.time_levels = 4;
    coarse.split_levels = 32;
    oracle::GridSpec fine = coarse;
    fine.energy_levels *= 2;
    fine.time_levels *= 2;
    fine.split_levels *= 2;
    const double a = oracle::grid_search_p2(s, g, coarse).objective;
    const double b = oracle::grid_search_p2(s, g, fine).objective;
    CHECK(b >= a * (1.0 - 1e-12));
    // One grid step per user and slot bounds the distance to the next grid.
    const oracle::GridResult c = oracle::grid_search_p2(s, g, coarse);
    CHECK(b <= c.objective + c.cell_slack * (1.0 + 1e-9) + 1e-12);
  }
}

TEST_CASE("limits and budget") {
  const Scenario big = tiny(2, 5, 1);
  CHECK_THROWS_AS(oracle::grid_search_p2(big, straight_gains(big), {}), Error);
  const Scenario s = tiny(3, 4, 2);
  oracle::GridSpec g;
  g.budget = 1000;
  try {
    oracle::grid_search_p2(s, straight_gains(s), g);
    FAIL("expected a budget error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBudget);
  }
  oracle::GridSpec zero;
  zero.time_levels = 0;
  CHECK_THROWS_AS(oracle::grid_search_p2(s, straight_gains(s), zero), Error);
}

TEST_CASE("partition enumeration") {
  const Scenario one = tiny(1, 2, 3);
  const oracle::PartitionResult p1 = oracle::enumerate_partitions_binary(one, straight_gains(one), {});
  REQUIRE(p1.all_objectives.size() == 2);
  CHECK(p1.objective == std::max(p1.all_objectives[0], p1.all_objectives[1]));
  CHECK(p1.offload[0] == (p1.all_objectives[1] > p1.all_objectives[0] ? 1 : 0));

  const Scenario two = tiny(2, 2, 3);
  const ChannelGains g = straight_gains(two);
  const oracle::PartitionResult p2 = oracle::enumerate_partitions_binary(two, g, {});
  REQUIRE(p2.all_objectives.size() == 4);
  // Partial allocation relaxes every partition.
  CHECK(oracle::grid_search_p2(two, g, {}).objective >= p2.objective * (1.0 - 1e-12));

  // Identical users reach identical values under either labeling.
  Scenario twin = two;
  twin.users[1] = twin.users[0];
  const oracle::PartitionResult pt = oracle::enumerate_partitions_binary(twin, straight_gains(twin), {});
  CHECK(pt.all_objectives[1] == doctest::Approx(pt.all_objectives[2]).epsilon(1e-12));
}

TEST_CASE("finite-difference gradient") {
  Eigen::VectorXd x(2);
  x << 3.0, -1.0;
  const auto sq = [](const Eigen::VectorXd& v) { return v.squaredNorm(); };
  const Eigen::VectorXd d = oracle::finite_difference_gradient(sq, x, 1e-4);
  CHECK(std::abs(d[0] - 6.0) <= 1e-8);
  CHECK(std::abs(d[1] + 2.0) <= 1e-8);
  CHECK_THROWS_AS(oracle::finite_difference_gradient(sq, x, 0.0), Error);
}

TEST_CASE("analytic Lagrangian derivatives match finite differences") {
  const Scenario s = tiny(2, 3, 6);
  const ChannelGains g = straight_gains(s);
  Eigen::MatrixXd f = Eigen::MatrixXd::Constant(2, 3, 2e8);
  Eigen::MatrixXd z = Eigen::MatrixXd::Constant(2, 3, 1e-12);
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(2, 3, 0.3);
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Constant(2, 3, 1e12);
  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(3, 0.1);
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 3; ++n) {
      const double hf = 1e-4 * f(m, n);
      Eigen::MatrixXd up = f, dn = f;
      up(m, n) += hf;
      dn(m, n) -= hf;
      const double fd_f = (oracle::partial_lagrangian(s, g, up, z, t, lambda, alpha) -
                           oracle::partial_lagrangian(s, g, dn, z, t, lambda, alpha)) / (2 * hf);
      const double an_f = oracle::partial_lagrangian_df(s, f, lambda, m, n);
      CHECK(std::abs(fd_f - an_f) <= 1e-5 * std::max(std::abs(an_f), 1e-9));
      // f is dropped here so its large terms do not swamp the difference.
      const Eigen::MatrixXd f0 = Eigen::MatrixXd::Zero(2, 3);
      const double hz = 1e-4 * z(m, n);
      Eigen::MatrixXd zu = z, zd = z;
      zu(m, n) += hz;
      zd(m, n) -= hz;
      const double fd_z = (oracle::partial_lagrangian(s, g, f0, zu, t, lambda, alpha) -
                           oracle::partial_lagrangian(s, g, f0, zd, t, lambda, alpha)) / (2 * hz);
      const double an_z = oracle::partial_lagrangian_dz(s, g, z, t, lambda, m, n);
      CHECK(std::abs(fd_z - an_z) <= 1e-5 * std::abs(an_z));
    }
}

TEST_CASE("trajectory grid rejects unsupported sizes") {
  const Scenario s = tiny(1, 4, 1);
  const Trajectory q = straight_line_trajectory(s);
  const Eigen::MatrixXd zed = Eigen::MatrixXd::Zero(1, 4);
  CHECK_THROWS_AS(oracle::grid_search_trajectory(s, q, zed, zed, zed, 0.1, 1.0), Error);
  const Scenario s3 = tiny(1, 3, 1);
  const Eigen::MatrixXd z3 = Eigen::MatrixXd::Zero(1, 3);
  CHECK_THROWS_AS(oracle::grid_search_trajectory(s3, straight_line_trajectory(s3), z3, z3, z3, 0.0, 1.0),
                  Error);
  CHECK_THROWS_AS(oracle::grid_search_trajectory(s3, straight_line_trajectory(s3), z3, z3, z3, 1e-3, 1.0, 100),
                  Error);
}
