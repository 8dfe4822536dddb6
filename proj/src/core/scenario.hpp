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
#include <string>
#include <vector>

#include <Eigen/Core>

namespace uavmec {

using Vec2 = Eigen::Vector2d;

struct UserSpec {
  Vec2 position{0.0, 0.0};
  double weight = 1.0;
  double overhead_factor = 1.1;   // nu_m >= 1
  double cpu_cycles_per_bit = 1e3;
  double capacitance_coeff = 1e-28;
};

struct UavSpec {
  double altitude = 10.0;
  double tx_power = 0.1;
  double max_speed = 20.0;
  Vec2 start{0.0, 0.0};
  Vec2 end{10.0, 0.0};
};

struct PhysicsSpec {
  double ref_gain = 1e-5;  // linear, at 1 m
  double eh_efficiency = 0.8;
  double bandwidth = 4e7;
  double noise_power = 1e-9;
};

struct TimeGrid {
  double horizon = 2.0;
  int slots = 50;

  double slot_len() const { return horizon / slots; }
};

enum class DualMethod { kExact, kSubgradient };

struct SolverSettings {
  double tol_outer = 1e-4;       // |R^i - R^{i-1}|, bits
  double tol_trajectory = 1e-4;  // sum of waypoint moves, meters
  double tol_mode = 1e-4;        // binary inner loop, bits
  int max_outer = 30;
  int max_sca = 50;
  int max_dual = 500;
  int max_mode = 20;
  double dual_tol = 1e-12;       // relative objective change in the dual loop
  double bisection_tol = 1e-14;  // relative
  double barrier_tol = 1e-8;     // duality measure of the barrier solve
  double barrier_shrink = 1e-9;  // interior relaxation, normalized units
  DualMethod dual_method = DualMethod::kExact;
  int subgradient_iters = 2000;
  double subgradient_step = 0.2;
  double f_cap = 1e10;  // Hz, only used while a suffix multiplier is zero
  double p_cap = 10.0;  // W, same
  bool paper_literal_speed = false;
};

// Validated problem instance. Construct through validate_scenario(),
// load_scenario_*() or default_paper_scenario(); treat as immutable after.
struct Scenario {
  std::vector<UserSpec> users;
  UavSpec uav;
  PhysicsSpec physics;
  TimeGrid grid;
  SolverSettings solver;

  int num_users() const { return static_cast<int>(users.size()); }
  int num_slots() const { return grid.slots; }
  double slot_len() const { return grid.slot_len(); }
  // Per-step displacement budget; squared-norm budget under the literal form.
  double step_budget() const;
  bool step_ok(const Vec2& from, const Vec2& to, double slack = 1e-12) const;
};

// Throws Error{kValidation} naming the first offending field, or
// Error{kInfeasible} when the endpoint cannot be reached within the horizon.
void validate_scenario(const Scenario& s);

Scenario load_scenario_string(const std::string& text);
Scenario load_scenario_file(const std::string& path);
std::string serialize_scenario(const Scenario& s);

// Four users on the corners of a 10 m square, weights [0.1 0.4 0.3 0.2].
Scenario default_paper_scenario();

// Users on the circle of radius 5*sqrt(2) around [5,5], equal weights 1/M.
// The first four angles reproduce the square corners used by the default.
Scenario circle_layout_scenario(const Scenario& base, int num_users);

// Stable 64-bit digest of the physically relevant content.
std::uint64_t scenario_fingerprint(const Scenario& s);

}  // namespace uavmec
