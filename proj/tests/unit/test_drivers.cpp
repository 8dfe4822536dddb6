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

#include <json.hpp>

#include "core/drivers.hpp"
#include "core/error.hpp"

using namespace uavmec;

namespace {

Scenario low_noise(int max_outer) {
  Scenario s = default_paper_scenario();
  s.physics.noise_power = 1e-12;
  s.solver.max_outer = max_outer;
  return s;
}

void check_report(const SolveReport& r, const Scenario& s) {
  REQUIRE(r.objective_trace.size() == static_cast<std::size_t>(r.outer_iterations));
  REQUIRE(r.best_trace.size() == r.objective_trace.size());
  REQUIRE(r.trajectory_trace.size() == r.objective_trace.size());
  CHECK(r.inner_iterations.size() == r.objective_trace.size());
  CHECK(r.sca_iterations.size() == r.objective_trace.size());
  double best = -1.0;
  for (std::size_t i = 0; i < r.objective_trace.size(); ++i) {
    best = std::max(best, r.objective_trace[i]);
    CHECK(r.best_trace[i] == best);
    CHECK(trajectory_feasible(r.trajectory_trace[i], s, 1e-9));
  }
  CHECK(r.objective == best);
  CHECK(r.converged != r.cap_hit);
  CHECK(trajectory_feasible(r.traj, s, 1e-9));
  CHECK(r.gains.matches(r.traj));
  double weighted = 0.0;
  for (int m = 0; m < s.num_users(); ++m) weighted += s.users[m].weight * r.user_bits[m];
  CHECK(weighted == doctest::Approx(r.objective).epsilon(1e-12));
}

}  // namespace

TEST_CASE("names round-trip") {
  for (Scheme sc : {Scheme::kPartial, Scheme::kBinary, Scheme::kLocalOnly, Scheme::kOffloadOnly})
    CHECK(parse_scheme(scheme_name(sc)) == sc);
  for (TrajectoryKind k :
       {TrajectoryKind::kOptimized, TrajectoryKind::kStraightLine, TrajectoryKind::kSemicircle})
    CHECK(parse_trajectory(trajectory_name(k)) == k);
  CHECK_THROWS_AS(parse_scheme("sideways"), Error);
  CHECK_THROWS_AS(parse_trajectory("loop"), Error);
}

TEST_CASE("straight line is evenly spaced") {
  const Scenario s = default_paper_scenario();
  const Trajectory t = straight_line_trajectory(s);
  REQUIRE(t.num_slots() == 50);
  CHECK(t.waypoints.front() == s.uav.start);
  CHECK(t.waypoints.back() == s.uav.end);
  for (int n = 0; n < 50; ++n)
    CHECK((t.waypoints[n + 1] - t.waypoints[n]).norm() == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("reference scenario, both algorithms") {
  const Scenario s = default_paper_scenario();
  const SolveReport a = algorithm1(s);
  CHECK(a.converged);
  CHECK(a.outer_iterations == 2);
  CHECK(a.objective == doctest::Approx(6944.570485).epsilon(1e-9));
  CHECK_FALSE(a.assignment.has_value());
  check_report(a, s);
  const SolveReport b = algorithm2(s);
  CHECK(b.converged);
  CHECK(b.objective == doctest::Approx(6944.570485).epsilon(1e-9));
  REQUIRE(b.assignment.has_value());
  CHECK(b.assignment->offload_set().empty());
  check_report(b, s);
  CHECK(b.objective <= a.objective * (1.0 + 1e-12));
}

TEST_CASE("low-noise runs ascend until the iteration cap") {
  const Scenario s = low_noise(3);
  const SolveReport a = algorithm1(s);
  CHECK(a.cap_hit);
  CHECK_FALSE(a.converged);
  CHECK(a.objective_trace.front() == doctest::Approx(31816.3978481).epsilon(1e-9));
  for (std::size_t i = 1; i < a.objective_trace.size(); ++i)
    CHECK(a.objective_trace[i] >= a.objective_trace[i - 1]);
  check_report(a, s);
  const SolveReport b = algorithm2(s);
  CHECK(b.objective_trace.front() == doctest::Approx(30380.942211).epsilon(1e-9));
  CHECK(b.objective <= a.objective);
  check_report(b, s);
}

TEST_CASE("fixed-trajectory runs take one outer iteration") {
  const Scenario s = low_noise(30);
  const Trajectory q = straight_line_trajectory(s);
  const SolveReport a = algorithm1(s, q, false);
  CHECK(a.outer_iterations == 1);
  CHECK(a.converged);
  CHECK(a.traj.fingerprint() == q.fingerprint());
  CHECK(a.objective == doctest::Approx(31816.3978481).epsilon(1e-9));
  const SolveReport local = algorithm1(s, q, false, std::vector<UserMode>(4, UserMode::kLocalOnly));
  CHECK(local.scheme == Scheme::kLocalOnly);
  CHECK(local.alloc.z.maxCoeff() == 0.0);
  CHECK(local.objective == doctest::Approx(6944.570485).epsilon(1e-9));
  const SolveReport off = algorithm1(s, q, false, std::vector<UserMode>(4, UserMode::kOffloadOnly));
  CHECK(off.scheme == Scheme::kOffloadOnly);
  CHECK(off.alloc.f.maxCoeff() == 0.0);
  CHECK(off.objective == doctest::Approx(30380.942211).epsilon(1e-9));
}

TEST_CASE("infeasible start trajectory is rejected") {
  const Scenario s = default_paper_scenario();
  Trajectory q = straight_line_trajectory(s);
  q.waypoints[10] = Vec2(5.0, 30.0);
  try {
    algorithm1(s, q);
    FAIL("expected an infeasible start");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasible);
  }
  CHECK_THROWS_AS(algorithm2(s, q), Error);
}

TEST_CASE("report JSON is deterministic and complete") {
  const Scenario s = default_paper_scenario();
  const SolveReport a = algorithm1(s);
  const SolveReport b = algorithm1(s);
  const std::string ja = report_to_json(a, s, false);
  CHECK(ja == report_to_json(b, s, false));
  const nlohmann::json j = nlohmann::json::parse(ja);
  CHECK(j.at("scheme") == "partial");
  CHECK(j.at("objective_bits").get<double>() == a.objective);
  CHECK(j.at("trajectory").size() == 51);
  CHECK(j.at("user_bits").size() == 4);
  CHECK(j.at("converged").get<bool>());
  CHECK_FALSE(j.contains("timings_s"));
  CHECK(nlohmann::json::parse(report_to_json(a, s, true)).contains("timings_s"));
  CHECK(nlohmann::json::parse(report_to_json(algorithm2(s), s, false)).contains("rho"));
}
