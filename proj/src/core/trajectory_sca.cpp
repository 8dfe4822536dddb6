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

#include "core/trajectory_sca.hpp"

#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace uavmec {

namespace {

void check_grid(const Trajectory& t, const Scenario& s) {
  if (t.num_slots() != s.num_slots())
    throw Error(ErrorCode::kInvalidArgument, "trajectory does not match the time grid");
}

double h2(const Scenario& s) { return s.uav.altitude * s.uav.altitude; }

// Tangent slope of log2(1 + A / (H^2 + s)) in s at the base, A = beta0 P / sigma^2.
double rate_slope(double snr_num, double h2_plus_s0) {
  return snr_num * std::numbers::log2e / (h2_plus_s0 * (h2_plus_s0 + snr_num));
}

Eigen::VectorXd to_vector(const Trajectory& t) {
  const int free = t.num_slots() - 1;
  Eigen::VectorXd x(2 * std::max(free, 0));
  for (int k = 0; k < free; ++k) x.segment<2>(2 * k) = t.waypoints[k + 1];
  return x;
}

Trajectory from_vector(const Eigen::VectorXd& x, const Trajectory& base) {
  Trajectory t = base;
  for (int k = 0; k + 1 < base.num_slots(); ++k) t.waypoints[k + 1] = x.segment<2>(2 * k);
  return t;
}

}  // namespace

ModeWeights ModeWeights::partial(int users) {
  return {Eigen::VectorXd::Ones(users), Eigen::VectorXd::Ones(users)};
}

ModeWeights ModeWeights::binary(const Eigen::VectorXd& rho) {
  return {Eigen::VectorXd::Ones(rho.size()) - rho, rho};
}

LinearizationPoint make_linearization(const Trajectory& base, const Scenario& s) {
  check_grid(base, s);
  LinearizationPoint lin;
  lin.base = base;
  lin.dist2.resize(s.num_users(), s.num_slots());
  lin.gain.resize(s.num_users(), s.num_slots());
  for (int m = 0; m < s.num_users(); ++m)
    for (int n = 0; n < s.num_slots(); ++n) {
      lin.dist2(m, n) = (base.waypoints[n] - s.users[m].position).squaredNorm();
      lin.gain(m, n) = s.physics.ref_gain / (h2(s) + lin.dist2(m, n));
    }
  return lin;
}

double energy_lower_bound(const LinearizationPoint& lin, const Trajectory& cand, int m, int n,
                          const Scenario& s) {
  check_grid(cand, s);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s0 = lin.dist2(m, i);
    const double d = h2(s) + s0;
    const double si = (cand.waypoints[i] - s.users[m].position).squaredNorm();
    sum += (h2(s) + 2.0 * s0 - si) / (d * d);
  }
  return s.physics.ref_gain * s.uav.tx_power * sum;
}

double energy_exact(const Trajectory& cand, int m, int n, const Scenario& s) {
  check_grid(cand, s);
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += 1.0 / (h2(s) + (cand.waypoints[i] - s.users[m].position).squaredNorm());
  return s.physics.ref_gain * s.uav.tx_power * sum;
}

double rate_lower_bound(const LinearizationPoint& lin, const Trajectory& cand, int m, int n,
                        double power, const Scenario& s) {
  if (power <= 0.0) return 0.0;
  const double a = s.physics.ref_gain * power / s.physics.noise_power;
  const double s0 = lin.dist2(m, n);
  const double d = h2(s) + s0;
  const double sn = (cand.waypoints[n] - s.users[m].position).squaredNorm();
  return std::log2(1.0 + a / d) - rate_slope(a, d) * (sn - s0);
}

double rate_exact(const Trajectory& cand, int m, int n, double power, const Scenario& s) {
  if (power <= 0.0) return 0.0;
  const double gain = channel_gain(cand.waypoints[n], s.users[m].position, s.physics,
                                   s.uav.altitude);
  return std::log2(1.0 + gain * power / s.physics.noise_power);
}

double trajectory_objective(const Trajectory& traj, const PrimalAllocation& a,
                            const Scenario& s, const ModeWeights& w) {
  check_grid(traj, s);
  const double delta = s.slot_len();
  double total = 0.0;
  for (int m = 0; m < s.num_users(); ++m) {
    const auto& u = s.users[m];
    double local = 0.0, offload = 0.0;
    for (int n = 0; n < s.num_slots(); ++n) {
      local += delta * a.f(m, n) / u.cpu_cycles_per_bit;
      if (a.t(m, n) > 0.0)
        offload += delta * s.physics.bandwidth / u.overhead_factor * a.t(m, n) *
                   rate_exact(traj, m, n, a.P(m, n), s);
    }
    total += u.weight * (w.local[m] * local + w.offload[m] * offload);
  }
  return total;
}

TrajectorySubproblem build_subproblem(const LinearizationPoint& lin, const PrimalAllocation& a,
                                      const Scenario& s, const ModeWeights& w) {
  const int n_users = s.num_users();
  const int n_slots = s.num_slots();
  const int free = n_slots - 1;
  const double hh = h2(s);
  const double delta = s.slot_len();

  TrajectorySubproblem sub;
  sub.lin = lin;
  sub.qp.blocks = std::max(free, 0);
  sub.rate_coeff = Matrix::Zero(n_users, n_slots);

  double norm = 0.0;
  for (int m = 0; m < n_users; ++m) {
    const auto& u = s.users[m];
    for (int n = 1; n < n_slots; ++n) {
      if (a.t(m, n) <= 0.0 || a.P(m, n) <= 0.0) continue;
      const double snr_num = s.physics.ref_gain * a.P(m, n) / s.physics.noise_power;
      const double c = u.weight * w.offload[m] * delta * s.physics.bandwidth / u.overhead_factor *
                       a.t(m, n) * rate_slope(snr_num, hh + lin.dist2(m, n));
      sub.rate_coeff(m, n) = c;
      norm += c * (hh + lin.dist2(m, n));
    }
  }
  sub.trivial = !(norm > 0.0) || free < 1;
  if (sub.trivial) return sub;
  for (int m = 0; m < n_users; ++m)
    for (int n = 1; n < n_slots; ++n)
      if (sub.rate_coeff(m, n) > 0.0)
        sub.qp.objective.terms.push_back({n - 1, -1, sub.rate_coeff(m, n) / norm,
                                          s.users[m].position});

  // Harvest-minorant prefixes: sum_{k<n} s_k / d_k^2 <= sum_{k<n} (H^2 + 2 s0_k) / d_k^2
  // - consumed / (eta0 P0 beta0), each row scaled by its harvest sum.
  const double supply = s.physics.eh_efficiency * s.uav.tx_power * s.physics.ref_gain;
  for (int m = 0; m < n_users; ++m) {
    const double gam = s.users[m].capacitance_coeff;
    double consumed = 0.0, rhs = 0.0, scale = 0.0;
    QuadForm row;
    for (int n = 0; n < n_slots; ++n) {
      const double f = a.f(m, n);
      consumed += w.local[m] * gam * f * f * f + w.offload[m] * a.z(m, n);
      const double s0 = lin.dist2(m, n);
      const double d = hh + s0;
      scale += 1.0 / d;
      rhs += (hh + 2.0 * s0) / (d * d);
      if (n == 0) {
        rhs -= s0 / (d * d);
      } else {
        row.terms.push_back({n - 1, -1, 1.0 / (d * d), s.users[m].position});
      }
      if (n == 0) continue;
      if (supply <= 0.0) continue;
      QuadForm g = row;
      for (auto& t : g.terms) t.weight /= scale;
      g.constant = -(rhs - consumed / supply) / scale - s.solver.barrier_shrink;
      sub.qp.constraints.push_back(std::move(g));
    }
  }

  const double budget = s.step_budget();
  const double b2 = s.solver.paper_literal_speed ? budget : budget * budget;
  for (int k = 0; k < n_slots; ++k) {
    QuadForm g;
    const bool from_free = k >= 1;
    const bool to_free = k + 1 <= free;
    if (from_free && to_free) {
      g.terms.push_back({k, k - 1, 1.0 / b2, Vec2::Zero()});
    } else if (to_free) {
      g.terms.push_back({k, -1, 1.0 / b2, s.uav.start});
    } else if (from_free) {
      g.terms.push_back({k - 1, -1, 1.0 / b2, s.uav.end});
    } else {
      continue;
    }
    g.constant = -1.0;
    sub.qp.constraints.push_back(std::move(g));
  }
  return sub;
}

SubproblemResult solve_trajectory_subproblem(const TrajectorySubproblem& sub,
                                             const Scenario& s) {
  SubproblemResult r;
  r.traj = sub.lin.base;
  if (sub.trivial) return r;
  const Eigen::VectorXd x0 = to_vector(sub.lin.base);
  BarrierSettings bs;
  bs.tol = s.solver.barrier_tol;
  const BarrierResult br = solve_barrier(sub.qp, x0, bs);
  r.feasible_start = br.feasible_start;
  r.converged = br.converged;
  r.base_value = -sub.qp.objective.value(x0);
  if (!br.feasible_start) {
    r.value = r.base_value;
    return r;
  }
  r.value = -sub.qp.objective.value(br.x);
  if (r.value <= r.base_value) {
    r.value = r.base_value;
    return r;
  }
  r.traj = from_vector(br.x, sub.lin.base);
  r.moved = true;
  return r;
}

ScaResult sca_trajectory_loop(const Trajectory& initial, const PrimalAllocation& a,
                              const Scenario& s, const ModeWeights& w) {
  check_grid(initial, s);
  ScaResult out;
  out.traj = initial;
  out.iterates.push_back(initial);
  out.objective_trace.push_back(trajectory_objective(initial, a, s, w));
  for (int j = 1; j <= s.solver.max_sca; ++j) {
    const LinearizationPoint lin = make_linearization(out.traj, s);
    const SubproblemResult res = solve_trajectory_subproblem(build_subproblem(lin, a, s, w), s);
    out.iterations = j;
    double moved = 0.0;
    for (std::size_t n = 0; n < res.traj.waypoints.size(); ++n)
      moved += (res.traj.waypoints[n] - out.traj.waypoints[n]).norm();
    const double value = trajectory_objective(res.traj, a, s, w);
    // The minorant guarantees ascent; a numerically lower value is rejected.
    if (value < out.objective_trace.back()) {
      out.converged = true;
      break;
    }
    out.traj = res.traj;
    out.iterates.push_back(res.traj);
    out.objective_trace.push_back(value);
    if (moved <= s.solver.tol_trajectory || !res.moved) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace uavmec
