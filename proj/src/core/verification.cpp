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

#include "core/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "core/binary_mode.hpp"
#include "core/drivers.hpp"
#include "core/error.hpp"
#include "core/oracle.hpp"
#include "core/partial_alloc.hpp"

namespace uavmec {

namespace {

constexpr double kKktTol = 1e-6;
constexpr double kFdTol = 1e-5;

CheckLine check(std::string name, double residual, double tol) {
  return {std::move(name), residual, tol, std::isfinite(residual) && residual <= tol};
}

std::string tag(const char* kind, int i, const Scenario& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s[%d] M=%d N=%d", kind, i, s.num_users(), s.num_slots());
  return buf;
}

}  // namespace

Scenario toy_scenario(int users, int slots, std::mt19937& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Scenario s = default_paper_scenario();
  s.users.resize(users);
  s.grid.slots = slots;
  s.grid.horizon = 0.5 * slots;
  for (auto& u : s.users) {
    u.position = Vec2(10.0 * u01(rng), 5.0 * u01(rng) - 2.5);
    u.weight = 0.3 + u01(rng);
  }
  s.physics.noise_power = std::pow(10.0, -13.0 + 3.0 * u01(rng));
  validate_scenario(s);
  return s;
}

std::vector<CheckLine> run_oracle_suite(const SuiteOptions& opt) {
  if (opt.num_users < 1 || opt.num_users > 2)
    throw Error(ErrorCode::kBudget, "oracle suite supports 1 or 2 users, got " +
                                        std::to_string(opt.num_users));
  if (opt.instances < 1) throw Error(ErrorCode::kInvalidArgument, "instances must be >= 1");
  std::mt19937 rng(opt.seed);
  std::vector<CheckLine> out;

  for (int i = 0; i < opt.instances; ++i) {
    const int users = 1 + i % opt.num_users;
    const Scenario s = toy_scenario(users, 2 + i % 3, rng);
    const Trajectory traj = straight_line_trajectory(s);
    const ChannelGains g = gains_for_trajectory(traj, s);
    const P2Result r = solve_p2(g, s);
    const oracle::GridResult o = oracle::grid_search_p2(s, g, {});
    const double gap = std::abs(r.objective - o.objective) / std::max(o.objective, 1e-300);
    out.push_back(check(tag("partial_gap", i, s), gap, opt.tolerance));
    out.push_back(check(tag("partial_floor", i, s),
                        std::max(0.0, (o.objective - o.cell_slack) - r.objective), 0.0));
    const StationarityResiduals kkt = stationarity_residuals(r.alloc, r.dual, g, s);
    out.push_back(check(tag("kkt_frequency", i, s), kkt.frequency, kKktTol));
    out.push_back(check(tag("kkt_power", i, s), kkt.power, kKktTol));

    // Cross-check the analytic Lagrangian gradient off the optimum, where it
    // is not zero and a relative comparison is meaningful.
    const Eigen::MatrixXd f1 = (r.alloc.f.array() * 1.25 + 1e6).matrix();
    const Eigen::MatrixXd z1 = (r.alloc.z.array() * 1.25 + 1e-9).matrix();
    const Eigen::MatrixXd t1 = (r.alloc.t.array() * 0.8 + 0.05).matrix();
    double fd_f = 0.0, fd_z = 0.0;
    for (int m = 0; m < users; ++m) {
      for (int n = 0; n < s.num_slots(); ++n) {
        const auto lf = [&](const Eigen::VectorXd& x) {
          Eigen::MatrixXd f = f1;
          f(m, n) = x[0];
          return oracle::partial_lagrangian(s, g, f, z1, t1, r.dual.lambda, r.dual.alpha);
        };
        const auto lz = [&](const Eigen::VectorXd& x) {
          Eigen::MatrixXd z = z1;
          z(m, n) = x[0];
          return oracle::partial_lagrangian(s, g, f1, z, t1, r.dual.lambda, r.dual.alpha);
        };
        const double an_f = oracle::partial_lagrangian_df(s, f1, r.dual.lambda, m, n);
        const double num_f = oracle::finite_difference_gradient(
            lf, Eigen::VectorXd::Constant(1, f1(m, n)), 1e-4 * f1(m, n))[0];
        const double scale_f = s.slot_len() * s.users[m].weight / s.users[m].cpu_cycles_per_bit;
        fd_f = std::max(fd_f, std::abs(an_f - num_f) / std::max(std::abs(an_f), scale_f));
        const double an_z = oracle::partial_lagrangian_dz(s, g, z1, t1, r.dual.lambda, m, n);
        const double num_z = oracle::finite_difference_gradient(
            lz, Eigen::VectorXd::Constant(1, z1(m, n)), 1e-5 * z1(m, n))[0];
        // Rate gain and energy price nearly cancel; compare on the price scale.
        const double scale_z = std::max(std::abs(an_z), s.slot_len() * r.dual.mu(m, n));
        fd_z = std::max(fd_z, std::abs(an_z - num_z) / std::max(scale_z, 1e-300));
      }
    }
    out.push_back(check(tag("fd_frequency", i, s), fd_f, kFdTol));
    out.push_back(check(tag("fd_power", i, s), fd_z, kFdTol));
  }

  for (int i = 0; i < opt.instances; ++i) {
    const int users = 1 + (i + 1) % opt.num_users;
    const Scenario s = toy_scenario(users, 2, rng);
    const Trajectory traj = straight_line_trajectory(s);
    const ChannelGains g = gains_for_trajectory(traj, s);
    const SolveReport r = algorithm2(s, traj, false);
    const oracle::PartitionResult o = oracle::enumerate_partitions_binary(s, g, {});
    const double gap = std::abs(r.objective - o.objective) / std::max(o.objective, 1e-300);
    out.push_back(check(tag("binary_gap", i, s), gap, opt.tolerance));

    const P6Result p6 = solve_p6_inner(g, s);
    double fd_rho = 0.0;
    for (int m = 0; m < users; ++m) {
      const auto& a = p6.alloc;
      const auto lr = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd rho = p6.assignment.rho;
        rho[m] = x[0];
        return oracle::binary_lagrangian(s, g, rho, a.f, a.z, a.t, p6.dual.upsilon,
                                         p6.dual.epsilon);
      };
      const double an = rho_derivative(m, a, g, p6.dual, s);
      const double num = oracle::finite_difference_gradient(
          lr, Eigen::VectorXd::Constant(1, p6.assignment.rho[m]), 1e-3)[0];
      const double ref = oracle::binary_lagrangian_drho(s, g, a.f, a.z, a.t, p6.dual.upsilon,
                                                        p6.dual.epsilon, m);
      // The score vanishes at a converged price, so compare on the scale of
      // the user's weighted bits rather than the score itself.
      PrimalAllocation only = a;
      const double bits = s.users[m].weight * per_user_bits(only, g, s)[m];
      const double scale = std::max({std::abs(an), std::abs(ref), bits, 1e-300});
      fd_rho = std::max({fd_rho, std::abs(an - num) / scale, std::abs(an - ref) / scale});
    }
    out.push_back(check(tag("fd_mode_score", i, s), fd_rho, kFdTol));
  }
  return out;
}

std::string format_checks(const std::vector<CheckLine>& lines) {
  std::string out;
  for (const auto& c : lines) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s %s residual=%.3e tol=%.3e\n", c.pass ? "PASS" : "FAIL",
                  c.name.c_str(), c.residual, c.tolerance);
    out += buf;
  }
  return out;
}

}  // namespace uavmec
