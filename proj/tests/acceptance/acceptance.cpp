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

// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "core/binary_mode.hpp"
#include "core/drivers.hpp"
#include "core/experiments.hpp"
#include "core/oracle.hpp"
#include "core/partial_alloc.hpp"
#include "core/trajectory_sca.hpp"
#include "core/verification.hpp"

using namespace uavmec;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

const std::vector<double> kPowers = {0.1, 0.2, 0.3, 0.4, 0.5};
constexpr double kTie = 1e-6;

Scenario table3(double p0) {
  Scenario s = default_paper_scenario();
  s.uav.tx_power = p0;
  return s;
}

bool at_least(double a, double b) { return a >= b - kTie * std::max(std::abs(a), std::abs(b)); }

// Largest decrease of f along n, and whether a zero follows a positive value.
void monotone_f(const Matrix& f, double& worst_drop, bool& zero_prefix_ok) {
  for (Eigen::Index m = 0; m < f.rows(); ++m)
    for (Eigen::Index n = 1; n < f.cols(); ++n) {
      worst_drop = std::max(worst_drop, f(m, n - 1) - f(m, n));
      if (f(m, n) == 0.0 && f(m, n - 1) != 0.0) zero_prefix_ok = false;
    }
}

// ---------------------------------------------------------------------------

Verdict oracle_partial() {
  const auto t0 = Clock::now();
  std::mt19937 rng(101);
  const int sizes[][2] = {{1, 2}, {1, 3}, {1, 4}, {2, 2}, {2, 3}, {2, 4}, {2, 2}, {1, 4}};
  double worst_gap = 0.0, worst_floor = 0.0;
  int count = 0;
  for (const auto& sz : sizes) {
    const Scenario s = toy_scenario(sz[0], sz[1], rng);
    const ChannelGains g = gains_for_trajectory(straight_line_trajectory(s), s);
    const P2Result r = solve_p2(g, s);
    const oracle::GridResult o = oracle::grid_search_p2(s, g, {});
    worst_gap = std::max(worst_gap, std::abs(r.objective - o.objective) / o.objective);
    worst_floor = std::max(worst_floor, (o.objective - o.cell_slack) - r.objective);
    ++count;
  }
  const double secs = since(t0);
  Verdict v;
  v.pass = worst_gap <= 0.01 && worst_floor <= 0.0 && secs < 60.0;
  v.detail = fmt("%d instances, worst gap %.2e (tol 1e-2), floor excess %.2e (<= 0), %.1f s (< 60)",
                 count, worst_gap, worst_floor, secs);
  return v;
}

Verdict oracle_binary() {
  const auto t0 = Clock::now();
  std::mt19937 rng(202);
  double worst = 0.0;
  int count = 0;
  for (int i = 0; i < 6; ++i) {
    const Scenario s = toy_scenario(1 + i % 2, 1 + (i / 2) % 2, rng);
    const Trajectory q = straight_line_trajectory(s);
    const ChannelGains g = gains_for_trajectory(q, s);
    const SolveReport r = algorithm2(s, q, false);
    const oracle::PartitionResult o = oracle::enumerate_partitions_binary(s, g, {});
    worst = std::max(worst, std::abs(r.objective - o.objective) / o.objective);
    ++count;
  }
  const double secs = since(t0);
  Verdict v;
  v.pass = worst <= 0.01 && secs < 120.0;
  v.detail = fmt("%d instances, worst gap %.2e (tol 1e-2), %.1f s (< 120)", count, worst, secs);
  return v;
}

// Every converged P2 and pinned-mode P2 inside P6 in the regression set.
struct RegressionSolve {
  Scenario s;
  ChannelGains g;
  P2Result r;
  bool binary = false;
};

std::vector<RegressionSolve> regression_solves() {
  std::vector<RegressionSolve> out;
  auto add = [&](const Scenario& s, const Trajectory& q) {
    const ChannelGains g = gains_for_trajectory(q, s);
    out.push_back({s, g, solve_p2(g, s), false});
    const P6Result p6 = solve_p6_inner(g, s);
    P2Options pinned;
    pinned.modes = p6.assignment.modes();
    out.push_back({s, g, solve_p2(g, s, pinned), true});
  };
  for (double p0 : kPowers) {
    const Scenario s = table3(p0);
    add(s, straight_line_trajectory(s));
    add(s, baseline_trajectory(TrajectoryKind::kSemicircle, s));
  }
  Scenario noisy = table3(0.1);
  noisy.physics.noise_power = 1e-12;
  add(noisy, straight_line_trajectory(noisy));
  add(noisy, baseline_trajectory(TrajectoryKind::kSemicircle, noisy));
  for (int m : {2, 6}) {
    const Scenario c = circle_layout_scenario(table3(0.2), m);
    add(c, straight_line_trajectory(c));
  }
  std::mt19937 rng(303);
  for (int i = 0; i < 6; ++i) {
    const Scenario s = toy_scenario(1 + i % 2, 2 + i % 3, rng);
    add(s, straight_line_trajectory(s));
  }
  return out;
}

Verdict kkt_stationarity(const std::vector<RegressionSolve>& solves) {
  double kkt = 0.0, mode_score = 0.0;
  int converged = 0;
  for (const auto& x : solves) {
    if (!x.r.converged) continue;
    ++converged;
    const StationarityResiduals res = stationarity_residuals(x.r.alloc, x.r.dual, x.g, x.s);
    kkt = std::max({kkt, res.frequency, res.power});
  }
  // Mode-score derivative against the independent closed form, at every
  // regression P6 solve.
  for (const auto& x : solves) {
    if (!x.binary) continue;
    const P6Result p6 = solve_p6_inner(x.g, x.s);
    for (int m = 0; m < x.s.num_users(); ++m) {
      const double an = rho_derivative(m, p6.alloc, x.g, p6.dual, x.s);
      const double ref = oracle::binary_lagrangian_drho(x.s, x.g, p6.alloc.f, p6.alloc.z,
                                                        p6.alloc.t, p6.dual.upsilon,
                                                        p6.dual.epsilon, m);
      const double bits = x.s.users[m].weight * per_user_bits(p6.alloc, x.g, x.s)[m];
      mode_score = std::max(mode_score,
                            std::abs(an - ref) / std::max({std::abs(ref), bits, 1e-300}));
    }
  }
  SuiteOptions o;
  o.instances = 5;
  double fd = 0.0;
  for (const auto& line : run_oracle_suite(o))
    if (line.name.rfind("fd_", 0) == 0) fd = std::max(fd, line.residual);
  Verdict v;
  v.pass = converged > 0 && kkt <= 1e-6 && mode_score <= 1e-6 && fd <= 1e-5;
  v.detail = fmt("%d converged solves, stationarity %.2e (tol 1e-6), mode score %.2e (tol 1e-6), "
                 "finite differences %.2e (tol 1e-5)",
                 converged, kkt, mode_score, fd);
  return v;
}

Verdict frequency_monotone(const std::vector<RegressionSolve>& solves) {
  double drop = 0.0;
  bool prefix = true;
  int count = 0;
  for (const auto& x : solves) {
    if (!x.r.converged) continue;
    monotone_f(x.r.alloc.f, drop, prefix);
    ++count;
  }
  for (double p0 : {0.1, 0.2}) {
    for (const SolveReport& r : {algorithm1(table3(p0)), algorithm2(table3(p0))}) {
      monotone_f(r.alloc.f, drop, prefix);
      ++count;
    }
  }
  Verdict v;
  v.pass = drop <= 0.0 && prefix;
  v.detail = fmt("%d allocations, largest decrease %.3e Hz (<= 0), zero prefix %s", count, drop,
                 prefix ? "exact" : "violated");
  return v;
}

Verdict sca_minorant_ascent() {
  std::mt19937 rng(404);
  double worst_below = -1e300, worst_touch = 0.0;
  int samples = 0;
  Scenario s = table3(0.1);
  s.physics.noise_power = 1e-12;
  const Trajectory bases[] = {straight_line_trajectory(s),
                              baseline_trajectory(TrajectoryKind::kSemicircle, s)};
  const double powers[] = {1e-3, 0.1, 10.0};
  for (const Trajectory& base : bases) {
    const LinearizationPoint lin = make_linearization(base, s);
    for (int m = 0; m < s.num_users(); ++m)
      for (int n = 0; n < s.num_slots(); ++n) {
        const double e = energy_exact(base, m, n + 1, s);
        worst_touch = std::max(worst_touch,
                               std::abs(energy_lower_bound(lin, base, m, n + 1, s) - e) / e);
        const double r = rate_exact(base, m, n, 0.1, s);
        worst_touch = std::max(worst_touch,
                               std::abs(rate_lower_bound(lin, base, m, n, 0.1, s) - r) / r);
      }
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double radii[] = {0.05, 0.3, 2.0};
    int accepted = 0;
    while (accepted < 500) {
      // Random offsets, halved until the path respects the speed limit.
      std::vector<Vec2> offset(s.num_slots() + 1, Vec2::Zero());
      for (int n = 1; n < s.num_slots(); ++n) offset[n] = Vec2(unit(rng), unit(rng));
      Trajectory cand = base;
      for (double rad = radii[accepted % 3]; rad > 1e-6; rad *= 0.5) {
        for (int n = 1; n < s.num_slots(); ++n)
          cand.waypoints[n] = base.waypoints[n] + rad * offset[n];
        if (trajectory_feasible(cand, s)) break;
      }
      if (!trajectory_feasible(cand, s)) continue;
      ++accepted;
      for (int m = 0; m < s.num_users(); ++m) {
        for (int n = 1; n <= s.num_slots(); ++n) {
          const double e = energy_exact(cand, m, n, s);
          worst_below = std::max(worst_below, (energy_lower_bound(lin, cand, m, n, s) - e) /
                                                  std::max(1.0, e) - 1e-12 * e / std::max(1.0, e));
        }
        for (int n = 0; n < s.num_slots(); ++n)
          for (double p : powers) {
            const double r = rate_exact(cand, m, n, p, s);
            worst_below = std::max(worst_below, rate_lower_bound(lin, cand, m, n, p, s) - r -
                                                    1e-12 * std::max(1.0, r));
          }
      }
    }
    samples += accepted;
  }
  // Ascent: SCA on the low-noise straight line for both mode families, and
  // on a layout that pulls the path off the line.
  double worst_dip = 0.0;
  int loops = 0;
  Scenario shifted = s;
  shifted.users[1].position = Vec2(5.0, 3.0);
  for (const Scenario& sc : {s, shifted}) {
    const Trajectory q = straight_line_trajectory(sc);
    const ChannelGains g = gains_for_trajectory(q, sc);
    const P2Result p2 = solve_p2(g, sc);
    const P6Result p6 = solve_p6_inner(g, sc);
    const ScaResult a = sca_trajectory_loop(q, p2.alloc, sc, ModeWeights::partial(sc.num_users()));
    const ScaResult b =
        sca_trajectory_loop(q, p6.alloc, sc, ModeWeights::binary(p6.assignment.rho));
    for (const ScaResult* r : {&a, &b}) {
      ++loops;
      for (std::size_t i = 1; i < r->objective_trace.size(); ++i)
        worst_dip = std::max(worst_dip, r->objective_trace[i - 1] - r->objective_trace[i]);
    }
  }
  Verdict v;
  v.pass = samples >= 1000 && worst_below <= 0.0 && worst_touch <= 1e-9 && worst_dip <= 1e-8;
  v.detail = fmt("%d feasible samples, bound excess %.2e (<= 0 after 1e-12 slack), base gap %.2e "
                 "(tol 1e-9), %d SCA loops, largest dip %.2e (tol 1e-8)",
                 samples, std::max(worst_below, 0.0), worst_touch, loops, worst_dip);
  return v;
}

Verdict convergence() {
  Verdict v;
  double slowest = 0.0;
  int most = 0;
  std::string misses;
  for (double p0 : {0.1, 0.2}) {
    const Scenario s = table3(p0);
    for (int alg = 1; alg <= 2; ++alg) {
      const auto t0 = Clock::now();
      const SolveReport r = alg == 1 ? algorithm1(s) : algorithm2(s);
      const double secs = since(t0);
      const auto& tr = r.objective_trace;
      const double last = tr.size() >= 2 ? std::abs(tr.back() - tr[tr.size() - 2]) : 1e300;
      const bool ok = r.converged && r.outer_iterations <= 30 && last <= 1e-4 && secs <= 300.0;
      if (!ok) misses += fmt(" alg%d@%.1f", alg, p0);
      v.pass = v.pass && ok;
      slowest = std::max(slowest, secs);
      most = std::max(most, r.outer_iterations);
    }
  }
  v.detail = fmt("at most %d outer iterations (<= 30), slowest run %.2f s (<= 300)%s%s", most,
                 slowest, misses.empty() ? "" : ", missed:", misses.c_str());
  return v;
}

// Grid of all schemes and paths over the swept powers.
struct PowerGrid {
  std::vector<ExperimentResult> rows;
  double at(Scheme sc, TrajectoryKind k, double p0) const {
    for (const auto& r : rows)
      if (r.scheme == sc && r.trajectory == k && r.value == p0) return r.objective;
    return std::nan("");
  }
};

PowerGrid power_grid() {
  SweepOptions o;
  o.schemes = {Scheme::kPartial, Scheme::kBinary, Scheme::kLocalOnly, Scheme::kOffloadOnly};
  o.trajectories = {TrajectoryKind::kOptimized, TrajectoryKind::kStraightLine,
                    TrajectoryKind::kSemicircle};
  o.workers = 1;
  return {sweep(table3(0.1), SweepVariable::kUavPower, kPowers, o)};
}

Verdict scheme_ordering(const PowerGrid& grid) {
  const auto opt = TrajectoryKind::kOptimized;
  std::string first;
  int violations = 0;
  auto flag = [&](bool ok, const std::string& what) {
    if (ok) return;
    if (first.empty()) first = what;
    ++violations;
  };
  for (double p0 : kPowers) {
    const double pa = grid.at(Scheme::kPartial, opt, p0), bi = grid.at(Scheme::kBinary, opt, p0);
    const double lo = grid.at(Scheme::kLocalOnly, opt, p0),
                 of = grid.at(Scheme::kOffloadOnly, opt, p0);
    flag(at_least(pa, bi), fmt("partial %.6g < binary %.6g at P0=%.1f", pa, bi, p0));
    flag(at_least(bi, std::max(lo, of)),
         fmt("binary %.6g < best single mode %.6g at P0=%.1f", bi, std::max(lo, of), p0));
    flag(at_least(of, lo), fmt("offload_only %.6g < local_only %.6g at P0=%.1f", of, lo, p0));
  }
  for (Scheme sc : {Scheme::kPartial, Scheme::kBinary, Scheme::kLocalOnly, Scheme::kOffloadOnly})
    for (std::size_t i = 1; i < kPowers.size(); ++i) {
      const double a = grid.at(sc, opt, kPowers[i - 1]), b = grid.at(sc, opt, kPowers[i]);
      flag(at_least(b, a), fmt("%s falls from %.6g to %.6g", scheme_name(sc), a, b));
    }
  Verdict v;
  v.pass = violations == 0;
  v.detail = violations == 0
                 ? fmt("all 20 orderings and 16 power steps hold (tie tol 1e-6)")
                 : fmt("%d violations; first: %s", violations, first.c_str());
  return v;
}

Verdict trajectory_ordering(const PowerGrid& grid) {
  std::string first;
  int violations = 0;
  for (Scheme sc : {Scheme::kPartial, Scheme::kBinary})
    for (double p0 : kPowers) {
      const double o = grid.at(sc, TrajectoryKind::kOptimized, p0);
      for (TrajectoryKind k : {TrajectoryKind::kStraightLine, TrajectoryKind::kSemicircle}) {
        const double b = grid.at(sc, k, p0);
        if (at_least(o, b)) continue;
        if (first.empty())
          first = fmt("%s optimized %.6g < %s %.6g at P0=%.1f", scheme_name(sc), o,
                      trajectory_name(k), b, p0);
        ++violations;
      }
    }
  Verdict v;
  v.pass = violations == 0;
  v.detail = violations == 0 ? fmt("optimized path wins all 20 comparisons (tie tol 1e-6)")
                             : fmt("%d of 20 comparisons fail; first: %s", violations,
                                   first.c_str());
  return v;
}

Verdict fairness() {
  const Scenario s = table3(0.1);
  const SolveReport r = algorithm1(s);
  const Eigen::VectorXd& b = r.user_bits;
  const bool bits_ok = std::min(b[1], b[2]) > std::max(b[0], b[3]);
  double d1 = 0.0, d2 = 0.0;
  const double hh = s.uav.altitude * s.uav.altitude;
  for (int n = 0; n < s.num_slots(); ++n) {
    d1 += std::sqrt(hh + (r.traj.waypoints[n] - s.users[0].position).squaredNorm());
    d2 += std::sqrt(hh + (r.traj.waypoints[n] - s.users[1].position).squaredNorm());
  }
  d1 /= s.num_slots();
  d2 /= s.num_slots();
  Verdict v;
  v.pass = bits_ok && d2 < d1;
  v.detail = fmt("bits u1..u4 = %.1f %.1f %.1f %.1f (u2,u3 > u1,u4: %s), mean distance u2 %.3f m "
                 "vs u1 %.3f m",
                 b[0], b[1], b[2], b[3], bits_ok ? "yes" : "no", d2, d1);
  return v;
}

Verdict user_scaling() {
  Verdict v;
  std::string detail;
  for (double p0 : {0.2, 0.4}) {
    double total[3], weighted[3];
    const int counts[3] = {2, 4, 6};
    for (int i = 0; i < 3; ++i) {
      const Scenario s = circle_layout_scenario(table3(p0), counts[i]);
      const SolveReport r = algorithm1(s);
      total[i] = r.user_bits.sum();
      weighted[i] = r.objective;
    }
    const double inc1 = total[1] - total[0], inc2 = total[2] - total[1];
    const bool ok = inc1 > 0.0 && inc2 > 0.0 && inc2 < inc1;
    v.pass = v.pass && ok;
    detail += fmt("%sP0=%.1f totals %.1f %.1f %.1f, increments %.1f then %.1f (weighted %.1f %.1f "
                  "%.1f)",
                  detail.empty() ? "" : "; ", p0, total[0], total[1], total[2], inc1, inc2,
                  weighted[0], weighted[1], weighted[2]);
  }
  v.detail = detail;
  return v;
}

Verdict runtime_ordering() {
  auto make = [](int slots, int users) {
    Scenario s = table3(0.1);
    s.grid.slots = slots;
    s.users.resize(users);
    return s;
  };
  const Scenario s502 = make(50, 2), s504 = make(50, 4), s704 = make(70, 4);
  const double a502 = measure_runtime(s502, Scheme::kPartial, 5);
  const double b502 = measure_runtime(s502, Scheme::kBinary, 5);
  const double a504 = measure_runtime(s504, Scheme::kPartial, 5);
  const double b504 = measure_runtime(s504, Scheme::kBinary, 5);
  const double a704 = measure_runtime(s704, Scheme::kPartial, 5);
  const double b704 = measure_runtime(s704, Scheme::kBinary, 5);
  Verdict v;
  v.pass = a502 < b502 && a504 < b504 && a704 > a504 && b704 > b504;
  v.detail = fmt("median s: alg1/alg2 (50,2) %.4f/%.4f, (50,4) %.4f/%.4f, (70,4) %.4f/%.4f", a502,
                 b502, a504, b504, a704, b704);
  return v;
}

Verdict determinism(const PowerGrid& grid) {
  const std::string first = results_csv(grid.rows, false);
  const PowerGrid again = power_grid();
  const std::string second = results_csv(again.rows, false);
  const Scenario s = table3(0.1);
  const auto c1 = compare(s, {Scheme::kPartial, Scheme::kBinary},
                          {TrajectoryKind::kOptimized, TrajectoryKind::kSemicircle}, 1);
  const auto c2 = compare(s, {Scheme::kPartial, Scheme::kBinary},
                          {TrajectoryKind::kOptimized, TrajectoryKind::kSemicircle}, 2);
  const std::string j1 = report_to_json(algorithm1(s), s, false);
  const std::string j2 = report_to_json(algorithm1(s), s, false);
  Verdict v;
  v.pass = first == second && results_csv(c1, false) == results_csv(c2, false) && j1 == j2;
  v.detail = fmt("sweep CSV %zu bytes %s, compare CSV across worker counts %s, report JSON %s",
                 first.size(), first == second ? "identical" : "differs",
                 results_csv(c1, false) == results_csv(c2, false) ? "identical" : "differs",
                 j1 == j2 ? "identical" : "differs");
  return v;
}

void print(int id, const char* name, const Verdict& v, double secs, bool& all) {
  std::printf("%s criterion %2d %-22s %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, name,
              v.detail.c_str(), secs);
  std::fflush(stdout);
  all = all && v.pass;
}

}  // namespace

int main() {
  bool all = true;
  auto run = [&](int id, const char* name, const std::function<Verdict()>& fn) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("error: ") + e.what();
    }
    print(id, name, v, since(t0), all);
  };

  run(1, "oracle_partial", oracle_partial);
  run(2, "oracle_binary", oracle_binary);
  std::vector<RegressionSolve> solves;
  run(3, "kkt_stationarity", [&] {
    solves = regression_solves();
    return kkt_stationarity(solves);
  });
  run(4, "frequency_monotone", [&] { return frequency_monotone(solves); });
  run(5, "sca_minorant_ascent", sca_minorant_ascent);
  run(6, "convergence", convergence);
  PowerGrid grid;
  run(7, "scheme_ordering", [&] {
    grid = power_grid();
    return scheme_ordering(grid);
  });
  run(8, "trajectory_ordering", [&] { return trajectory_ordering(grid); });
  run(9, "fairness", fairness);
  run(10, "user_scaling", user_scaling);
  run(11, "runtime_ordering", runtime_ordering);
  run(12, "determinism", [&] { return determinism(grid); });
  return all ? 0 : 1;
}
