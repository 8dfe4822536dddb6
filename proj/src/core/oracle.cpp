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

#include "core/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "core/error.hpp"

namespace uavmec::oracle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double slot_value(const Scenario& s, int m, double gain, double e_local, double e_offload,
                  double t) {
  const auto& u = s.users[m];
  const double delta = s.grid.horizon / s.grid.slots;
  double v = delta * std::cbrt(e_local / u.capacitance_coeff) / u.cpu_cycles_per_bit;
  if (t > 0.0 && e_offload > 0.0)
    v += delta * s.physics.bandwidth / u.overhead_factor * t *
         std::log2(1.0 + gain * e_offload / (s.physics.noise_power * t));
  return u.weight * v;
}

// Per-user tables over (energy step j, airtime step i).
struct UserTable {
  double step = 0.0;         // energy per level, power-sum units
  std::vector<int> cap;      // highest reachable level after slot n
  // value[n][j * (T+1) + i], split[n][...] = best split index
  std::vector<std::vector<double>> value;
  std::vector<std::vector<int>> split;
};

UserTable build_table(const Scenario& s, const ChannelGains& g, int m, Family fam,
                      const GridSpec& grid) {
  const int n_slots = g.num_slots();
  const int levels = grid.energy_levels;
  const int tl = grid.time_levels;
  const int rl = grid.split_levels;
  UserTable tab;
  std::vector<double> harvest(n_slots + 1, 0.0);
  for (int n = 0; n < n_slots; ++n)
    harvest[n + 1] = harvest[n] + s.physics.eh_efficiency * s.uav.tx_power * g.h(m, n);
  tab.step = harvest[n_slots] / levels;
  tab.cap.resize(n_slots);
  for (int n = 0; n < n_slots; ++n) {
    tab.cap[n] = tab.step > 0.0
                     ? std::min(levels, static_cast<int>(std::floor(
                                            harvest[n + 1] / tab.step * (1.0 + 1e-12))))
                     : 0;
  }
  tab.value.assign(n_slots, std::vector<double>((levels + 1) * (tl + 1), kNegInf));
  tab.split.assign(n_slots, std::vector<int>((levels + 1) * (tl + 1), 0));
  for (int n = 0; n < n_slots; ++n) {
    for (int j = 0; j <= levels; ++j) {
      const double e = j * tab.step;
      for (int i = 0; i <= tl; ++i) {
        if (i > 0 && fam == Family::kLocal) continue;
        const double t = static_cast<double>(i) / tl;
        double best = kNegInf;
        int arg = 0;
        for (int q = 0; q <= rl; ++q) {
          const double r = static_cast<double>(q) / rl;  // local fraction
          if (fam == Family::kLocal && q != rl) continue;
          if (fam == Family::kOffload && q != 0) continue;
          if (i == 0 && q != rl && fam != Family::kOffload) continue;
          if (i == 0 && fam == Family::kOffload && j > 0) continue;
          const double v = slot_value(s, m, g.h(m, n), r * e, (1.0 - r) * e, t);
          if (v > best) {
            best = v;
            arg = q;
          }
        }
        tab.value[n][j * (tl + 1) + i] = best;
        tab.split[n][j * (tl + 1) + i] = arg;
      }
    }
  }
  return tab;
}

struct Group {
  std::vector<int> users;
  std::vector<Family> fams;
};

// Joint DP over a group of users that share airtime.
double solve_group(const Scenario& s, const ChannelGains& g, const Group& grp,
                   const GridSpec& grid, GridAllocation& out, double& slack) {
  const int k = static_cast<int>(grp.users.size());
  const int n_slots = g.num_slots();
  const int base = grid.energy_levels + 1;
  const int tl = grid.time_levels;
  std::vector<UserTable> tabs;
  for (int a = 0; a < k; ++a) tabs.push_back(build_table(s, g, grp.users[a], grp.fams[a], grid));

  int states = 1;
  for (int a = 0; a < k; ++a) states *= base;
  auto digit = [&](int code, int a) {
    for (int b = 0; b < a; ++b) code /= base;
    return code % base;
  };

  // Best airtime split per slot and jump vector (knapsack over the group).
  std::vector<std::vector<double>> qval(n_slots, std::vector<double>(states, kNegInf));
  std::vector<std::vector<std::vector<int>>> qtime(
      n_slots, std::vector<std::vector<int>>(states, std::vector<int>(k, 0)));
  for (int n = 0; n < n_slots; ++n) {
    for (int code = 0; code < states; ++code) {
      // best[a][used]: best value of users 0..a-1 using `used` airtime steps.
      std::vector<std::vector<double>> best(k + 1, std::vector<double>(tl + 1, kNegInf));
      std::vector<std::vector<int>> pick(k + 1, std::vector<int>(tl + 1, 0));
      best[0][0] = 0.0;
      for (int a = 0; a < k; ++a) {
        const int j = digit(code, a);
        for (int used = 0; used <= tl; ++used) {
          if (best[a][used] == kNegInf) continue;
          for (int i = 0; used + i <= tl; ++i) {
            const double v = tabs[a].value[n][j * (tl + 1) + i];
            if (v == kNegInf) continue;
            if (best[a][used] + v > best[a + 1][used + i]) {
              best[a + 1][used + i] = best[a][used] + v;
              pick[a + 1][used + i] = i;
            }
          }
        }
      }
      int arg = 0;
      for (int used = 0; used <= tl; ++used)
        if (best[k][used] > best[k][arg]) arg = used;
      qval[n][code] = best[k][arg];
      for (int a = k; a >= 1; --a) {
        const int i = pick[a][arg];
        qtime[n][code][a - 1] = i;
        arg -= i;
      }
    }
  }

  std::vector<double> cur(states, kNegInf), nxt(states);
  cur[0] = 0.0;
  std::vector<std::vector<int>> from(n_slots, std::vector<int>(states, -1));
  std::vector<int> lv(k), jv(k);
  for (int n = 0; n < n_slots; ++n) {
    std::fill(nxt.begin(), nxt.end(), kNegInf);
    for (int code = 0; code < states; ++code) {
      if (cur[code] == kNegInf) continue;
      for (int a = 0; a < k; ++a) lv[a] = digit(code, a);
      for (int jump = 0; jump < states; ++jump) {
        bool ok = true;
        int target = 0, mult = 1;
        for (int a = 0; a < k; ++a) {
          jv[a] = digit(jump, a);
          const int nl = lv[a] + jv[a];
          if (nl > tabs[a].cap[n]) { ok = false; break; }
          target += nl * mult;
          mult *= base;
        }
        if (!ok || qval[n][jump] == kNegInf) continue;
        const double v = cur[code] + qval[n][jump];
        if (v > nxt[target]) {
          nxt[target] = v;
          from[n][target] = jump;
        }
      }
    }
    cur.swap(nxt);
  }
  int end = 0;
  for (int code = 0; code < states; ++code)
    if (cur[code] > cur[end]) end = code;
  const double best_value = cur[end];

  // Trace back the jump vectors.
  int code = end;
  for (int n = n_slots - 1; n >= 0; --n) {
    const int jump = from[n][code];
    for (int a = 0; a < k; ++a) {
      const int m = grp.users[a];
      const int j = digit(jump, a);
      const int i = qtime[n][jump][a];
      const int idx = j * (tl + 1) + i;
      const double r = static_cast<double>(tabs[a].split[n][idx]) / grid.split_levels;
      const double e = j * tabs[a].step;
      const double t = static_cast<double>(i) / tl;
      out.f(m, n) = std::cbrt(r * e / s.users[m].capacitance_coeff);
      out.z(m, n) = t > 0.0 ? (1.0 - r) * e : 0.0;
      out.t(m, n) = out.z(m, n) > 0.0 ? t : 0.0;
      out.P(m, n) = out.t(m, n) > 0.0 ? out.z(m, n) / out.t(m, n) : 0.0;
      if (j < grid.energy_levels) {
        const double up = tabs[a].value[n][(j + 1) * (tl + 1) + i];
        if (up != kNegInf) slack += std::max(0.0, up - tabs[a].value[n][idx]);
      }
    }
    int prev = 0, mult = 1;
    for (int a = 0; a < k; ++a) {
      prev += (digit(code, a) - digit(jump, a)) * mult;
      mult *= base;
    }
    code = prev;
  }
  return best_value;
}

std::int64_t group_cost(int k, int slots, const GridSpec& grid) {
  const double base = grid.energy_levels + 1.0;
  const double st = std::pow(base, k);
  const double tl = grid.time_levels + 1.0;
  const double cost = slots * (st * st + st * k * tl * tl) +
                      k * slots * base * tl * (grid.split_levels + 1.0);
  return cost > 9e18 ? std::numeric_limits<std::int64_t>::max()
                     : static_cast<std::int64_t>(cost);
}

}  // namespace

GridResult grid_search_p2(const Scenario& s, const ChannelGains& g, const GridSpec& grid,
                          const std::vector<Family>& families) {
  const int n_users = g.num_users();
  const int n_slots = g.num_slots();
  if (n_users > 4 || n_slots > 4)
    throw Error(ErrorCode::kInvalidArgument, "oracle is limited to M <= 4 and N <= 4");
  if (grid.energy_levels < 1 || grid.time_levels < 1 || grid.split_levels < 1)
    throw Error(ErrorCode::kInvalidArgument, "oracle grid counts must be >= 1");
  std::vector<Family> fams = families.empty() ? std::vector<Family>(n_users, Family::kBoth)
                                              : families;

  // Local-only users never touch airtime, so they decouple.
  std::vector<Group> groups;
  Group shared;
  for (int m = 0; m < n_users; ++m) {
    if (fams[m] == Family::kLocal) groups.push_back({{m}, {Family::kLocal}});
    else { shared.users.push_back(m); shared.fams.push_back(fams[m]); }
  }
  if (!shared.users.empty()) groups.push_back(shared);

  GridResult res;
  for (const Group& grp : groups) {
    const std::int64_t c = group_cost(static_cast<int>(grp.users.size()), n_slots, grid);
    if (c > grid.budget - res.evaluations)
      throw Error(ErrorCode::kBudget, "oracle grid needs " + std::to_string(c) +
                                          " evaluations, budget is " +
                                          std::to_string(grid.budget));
    res.evaluations += c;
  }
  res.alloc.f = Eigen::MatrixXd::Zero(n_users, n_slots);
  res.alloc.P = res.alloc.f;
  res.alloc.t = res.alloc.f;
  res.alloc.z = res.alloc.f;
  for (const Group& grp : groups)
    res.objective += solve_group(s, g, grp, grid, res.alloc, res.cell_slack);
  return res;
}

PartitionResult enumerate_partitions_binary(const Scenario& s, const ChannelGains& g,
                                            const GridSpec& grid) {
  const int n_users = g.num_users();
  if (n_users > 4 || g.num_slots() > 4)
    throw Error(ErrorCode::kInvalidArgument, "partition enumeration is limited to M <= 4, N <= 4");
  PartitionResult out;
  out.objective = kNegInf;
  for (int mask = 0; mask < (1 << n_users); ++mask) {
    std::vector<Family> fams(n_users);
    int k = 0;
    for (int m = 0; m < n_users; ++m) {
      fams[m] = (mask >> m) & 1 ? Family::kOffload : Family::kLocal;
      k += (mask >> m) & 1;
    }
    // Larger coupled groups get a coarser energy grid to stay in budget.
    GridSpec gs = grid;
    while (gs.energy_levels > 1 && group_cost(k, g.num_slots(), gs) > grid.budget)
      gs.energy_levels /= 2;
    const double v = grid_search_p2(s, g, gs, fams).objective;
    out.all_objectives.push_back(v);
    if (v > out.objective) {
      out.objective = v;
      out.offload.assign(n_users, 0);
      for (int m = 0; m < n_users; ++m) out.offload[m] = (mask >> m) & 1;
    }
  }
  return out;
}

Eigen::VectorXd finite_difference_gradient(const std::function<double(const Eigen::VectorXd&)>& fn,
                                           const Eigen::VectorXd& x, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step must be > 0");
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = fn(probe);
    probe[i] = x[i] - step;
    const double down = fn(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double partial_lagrangian(const Scenario& s, const ChannelGains& g, const Eigen::MatrixXd& f,
                          const Eigen::MatrixXd& z, const Eigen::MatrixXd& t,
                          const Eigen::MatrixXd& lambda, const Eigen::VectorXd& alpha) {
  const double delta = s.grid.horizon / s.grid.slots;
  double L = 0.0;
  for (int m = 0; m < g.num_users(); ++m) {
    const auto& u = s.users[m];
    double harvest = 0.0, spent = 0.0;
    for (int n = 0; n < g.num_slots(); ++n) {
      L += u.weight * delta * f(m, n) / u.cpu_cycles_per_bit;
      if (t(m, n) > 0.0)
        L += u.weight * delta * s.physics.bandwidth / u.overhead_factor * t(m, n) *
             std::log2(1.0 + g.h(m, n) * z(m, n) / (s.physics.noise_power * t(m, n)));
      harvest += s.physics.eh_efficiency * g.h(m, n) * s.uav.tx_power;
      spent += u.capacitance_coeff * std::pow(f(m, n), 3) + z(m, n);
      L += lambda(m, n) * delta * (harvest - spent);
    }
  }
  for (int n = 0; n < g.num_slots(); ++n) L += alpha[n] * (1.0 - t.col(n).sum());
  return L;
}

double partial_lagrangian_df(const Scenario& s, const Eigen::MatrixXd& f,
                             const Eigen::MatrixXd& lambda, int m, int n) {
  const auto& u = s.users[m];
  const double delta = s.grid.horizon / s.grid.slots;
  double mu = 0.0;
  for (Eigen::Index k = n; k < lambda.cols(); ++k) mu += lambda(m, k);
  return delta * u.weight / u.cpu_cycles_per_bit -
         3.0 * delta * u.capacitance_coeff * f(m, n) * f(m, n) * mu;
}

double partial_lagrangian_dz(const Scenario& s, const ChannelGains& g, const Eigen::MatrixXd& z,
                             const Eigen::MatrixXd& t, const Eigen::MatrixXd& lambda, int m,
                             int n) {
  const auto& u = s.users[m];
  const double delta = s.grid.horizon / s.grid.slots;
  double mu = 0.0;
  for (Eigen::Index k = n; k < lambda.cols(); ++k) mu += lambda(m, k);
  const double rate = u.weight * s.physics.bandwidth * delta * t(m, n) /
                      (u.overhead_factor * std::numbers::ln2) * g.h(m, n) /
                      (s.physics.noise_power * t(m, n) + g.h(m, n) * z(m, n));
  return rate - delta * mu;
}

double binary_lagrangian(const Scenario& s, const ChannelGains& g, const Eigen::VectorXd& rho,
                         const Eigen::MatrixXd& f, const Eigen::MatrixXd& z,
                         const Eigen::MatrixXd& t, const Eigen::MatrixXd& upsilon,
                         const Eigen::VectorXd& epsilon) {
  const double delta = s.grid.horizon / s.grid.slots;
  double L = 0.0;
  for (int m = 0; m < g.num_users(); ++m) {
    const auto& u = s.users[m];
    double harvest = 0.0, spent = 0.0;
    for (int n = 0; n < g.num_slots(); ++n) {
      double bits = (1.0 - rho[m]) * delta * f(m, n) / u.cpu_cycles_per_bit;
      if (t(m, n) > 0.0)
        bits += rho[m] * delta * s.physics.bandwidth / u.overhead_factor * t(m, n) *
                std::log2(1.0 + g.h(m, n) * z(m, n) / (s.physics.noise_power * t(m, n)));
      L += u.weight * bits;
      harvest += s.physics.eh_efficiency * g.h(m, n) * s.uav.tx_power;
      spent += (1.0 - rho[m]) * u.capacitance_coeff * std::pow(f(m, n), 3) + rho[m] * z(m, n);
      L += upsilon(m, n) * delta * (harvest - spent);
    }
  }
  for (int n = 0; n < g.num_slots(); ++n) {
    double used = 0.0;
    for (int m = 0; m < g.num_users(); ++m) used += rho[m] * t(m, n);
    L += epsilon[n] * (1.0 - used);
  }
  return L;
}

double binary_lagrangian_drho(const Scenario& s, const ChannelGains& g, const Eigen::MatrixXd& f,
                              const Eigen::MatrixXd& z, const Eigen::MatrixXd& t,
                              const Eigen::MatrixXd& upsilon, const Eigen::VectorXd& epsilon,
                              int m) {
  const auto& u = s.users[m];
  const double delta = s.grid.horizon / s.grid.slots;
  double d = 0.0, prefix = 0.0;
  for (int n = 0; n < g.num_slots(); ++n) {
    d -= u.weight * delta * f(m, n) / u.cpu_cycles_per_bit;
    if (t(m, n) > 0.0)
      d += u.weight * delta * s.physics.bandwidth / u.overhead_factor * t(m, n) *
           std::log2(1.0 + g.h(m, n) * z(m, n) / (s.physics.noise_power * t(m, n)));
    prefix += -u.capacitance_coeff * std::pow(f(m, n), 3) + z(m, n);
    d -= upsilon(m, n) * delta * prefix;
    d -= epsilon[n] * t(m, n);
  }
  return d;
}

double trajectory_surrogate(const Scenario& s, const Trajectory& base, const Trajectory& cand,
                            const Eigen::MatrixXd& P, const Eigen::MatrixXd& t) {
  const double delta = s.grid.horizon / s.grid.slots;
  const double hh = s.uav.altitude * s.uav.altitude;
  double v = 0.0;
  for (int m = 0; m < s.num_users(); ++m) {
    const auto& u = s.users[m];
    for (int n = 0; n < s.num_slots(); ++n) {
      if (t(m, n) <= 0.0 || P(m, n) <= 0.0) continue;
      const double a = s.physics.ref_gain * P(m, n) / s.physics.noise_power;
      const double s0 = (base.waypoints[n] - u.position).squaredNorm();
      const double sn = (cand.waypoints[n] - u.position).squaredNorm();
      // log2(1 + a/(H^2+s)) is convex in s; its tangent at s0 lies below.
      const double y = std::log2(1.0 + a / (hh + s0)) -
                       a / ((hh + s0) * (hh + s0 + a)) / std::numbers::ln2 * (sn - s0);
      v += u.weight * delta * s.physics.bandwidth / u.overhead_factor * t(m, n) * y;
    }
  }
  return v;
}

TrajectoryGridResult grid_search_trajectory(const Scenario& s, const Trajectory& base,
                                            const Eigen::MatrixXd& f, const Eigen::MatrixXd& P,
                                            const Eigen::MatrixXd& t, double pitch,
                                            double radius, std::int64_t budget) {
  const int n_slots = s.num_slots();
  if (n_slots < 2 || n_slots > 3)
    throw Error(ErrorCode::kInvalidArgument, "trajectory grid search needs N in {2, 3}");
  if (!(pitch > 0.0)) throw Error(ErrorCode::kInvalidArgument, "pitch must be > 0");
  const int steps = static_cast<int>(std::floor(radius / pitch + 1e-9));
  const int side = 2 * steps + 1;
  const int free = n_slots - 1;
  std::int64_t count = 1;
  for (int k = 0; k < 2 * free; ++k) count *= side;
  if (count > budget)
    throw Error(ErrorCode::kBudget, "trajectory grid needs " + std::to_string(count) +
                                        " points, budget is " + std::to_string(budget));

  const double hh = s.uav.altitude * s.uav.altitude;
  const double supply = s.physics.eh_efficiency * s.uav.tx_power * s.physics.ref_gain;
  const double step_budget = s.uav.max_speed * s.grid.horizon / s.grid.slots;
  auto step_ok = [&](const Vec2& a, const Vec2& b) {
    const double d2 = (b - a).squaredNorm();
    return s.solver.paper_literal_speed ? d2 <= step_budget : std::sqrt(d2) <= step_budget;
  };
  auto energy_ok = [&](const Trajectory& c) {
    for (int m = 0; m < s.num_users(); ++m) {
      const auto& u = s.users[m];
      double spent = 0.0, bound = 0.0;
      for (int n = 0; n < n_slots; ++n) {
        spent += u.capacitance_coeff * std::pow(f(m, n), 3) + t(m, n) * P(m, n);
        const double s0 = (base.waypoints[n] - u.position).squaredNorm();
        const double sn = (c.waypoints[n] - u.position).squaredNorm();
        bound += supply * (hh + 2.0 * s0 - sn) / ((hh + s0) * (hh + s0));
        if (spent > bound * (1.0 + 1e-9)) return false;
      }
    }
    return true;
  };

  TrajectoryGridResult best;
  best.value = kNegInf;
  best.traj = base;
  Trajectory cand = base;
  std::vector<int> idx(2 * free, 0);
  for (std::int64_t c = 0; c < count; ++c) {
    std::int64_t rem = c;
    for (int k = 0; k < 2 * free; ++k) {
      idx[k] = static_cast<int>(rem % side) - steps;
      rem /= side;
    }
    for (int w = 0; w < free; ++w)
      cand.waypoints[w + 1] =
          base.waypoints[w + 1] + pitch * Vec2(idx[2 * w], idx[2 * w + 1]);
    ++best.evaluations;
    bool ok = true;
    for (int n = 0; n < n_slots && ok; ++n) ok = step_ok(cand.waypoints[n], cand.waypoints[n + 1]);
    if (!ok || !energy_ok(cand)) continue;
    const double v = trajectory_surrogate(s, base, cand, P, t);
    if (v > best.value) {
      best.value = v;
      best.traj = cand;
    }
  }
  return best;
}

}  // namespace uavmec::oracle
