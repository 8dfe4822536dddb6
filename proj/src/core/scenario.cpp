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

#include "core/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "core/error.hpp"
#include "json.hpp"

namespace uavmec {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kValidation, field + " " + what);
}

bool finite2(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

Vec2 read_point(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    invalid(field, "must be a two-element numeric array");
  return {j[0].get<double>(), j[1].get<double>()};
}

double read_number(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) invalid(path + "." + key, "is required");
  const auto& v = obj.at(key);
  if (!v.is_number()) invalid(path + "." + key, "must be a number");
  return v.get<double>();
}

double read_number_or(const json& obj, const char* key, const std::string& path,
                      double fallback) {
  if (!obj.contains(key)) return fallback;
  return read_number(obj, key, path);
}

const json& read_object(const json& root, const char* key) {
  if (!root.contains(key)) invalid(key, "is required");
  const auto& v = root.at(key);
  if (!v.is_object()) invalid(key, "must be an object");
  return v;
}

void read_solver(const json& j, SolverSettings& s) {
  static const char* const kKnown[] = {
      "tol_outer", "tol_trajectory", "tol_mode", "max_outer", "max_sca",
      "max_dual", "max_mode", "dual_tol", "bisection_tol", "barrier_tol",
      "barrier_shrink", "dual_method", "subgradient_iters", "subgradient_step",
      "f_cap", "p_cap", "paper_literal_speed"};
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) invalid("solver." + key, "is not a recognized setting");
  }
  auto num = [&](const char* key, double& out) {
    out = read_number_or(j, key, "solver", out);
  };
  auto integer = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number_integer())
      invalid(std::string("solver.") + key, "must be an integer");
    out = j.at(key).get<int>();
  };
  num("tol_outer", s.tol_outer);
  num("tol_trajectory", s.tol_trajectory);
  num("tol_mode", s.tol_mode);
  integer("max_outer", s.max_outer);
  integer("max_sca", s.max_sca);
  integer("max_dual", s.max_dual);
  integer("max_mode", s.max_mode);
  num("dual_tol", s.dual_tol);
  num("bisection_tol", s.bisection_tol);
  num("barrier_tol", s.barrier_tol);
  num("barrier_shrink", s.barrier_shrink);
  integer("subgradient_iters", s.subgradient_iters);
  num("subgradient_step", s.subgradient_step);
  num("f_cap", s.f_cap);
  num("p_cap", s.p_cap);
  if (j.contains("dual_method")) {
    const auto& v = j.at("dual_method");
    if (v == "exact") s.dual_method = DualMethod::kExact;
    else if (v == "subgradient") s.dual_method = DualMethod::kSubgradient;
    else invalid("solver.dual_method", "must be \"exact\" or \"subgradient\"");
  }
  if (j.contains("paper_literal_speed")) {
    if (!j.at("paper_literal_speed").is_boolean())
      invalid("solver.paper_literal_speed", "must be a boolean");
    s.paper_literal_speed = j.at("paper_literal_speed").get<bool>();
  }
}

json point_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

}  // namespace

double Scenario::step_budget() const {
  const double reach = uav.max_speed * slot_len();
  return reach;
}

bool Scenario::step_ok(const Vec2& from, const Vec2& to, double slack) const {
  const double d2 = (to - from).squaredNorm();
  if (solver.paper_literal_speed) return d2 <= step_budget() + slack;
  return std::sqrt(d2) <= step_budget() + slack;
}

void validate_scenario(const Scenario& s) {
  if (s.users.empty()) invalid("users", "must contain at least one user");
  for (std::size_t i = 0; i < s.users.size(); ++i) {
    const auto& u = s.users[i];
    const std::string p = "users[" + std::to_string(i) + "]";
    if (!finite2(u.position)) invalid(p + ".position", "must be finite");
    if (!(u.weight > 0) || !std::isfinite(u.weight)) invalid(p + ".weight", "must be > 0");
    if (!(u.overhead_factor >= 1) || !std::isfinite(u.overhead_factor))
      invalid(p + ".overhead_factor", "must be >= 1");
    if (!(u.cpu_cycles_per_bit > 0) || !std::isfinite(u.cpu_cycles_per_bit))
      invalid(p + ".cpu_cycles_per_bit", "must be > 0");
    if (!(u.capacitance_coeff > 0) || !std::isfinite(u.capacitance_coeff))
      invalid(p + ".capacitance_coeff", "must be > 0");
  }
  const auto& a = s.uav;
  if (!(a.altitude > 0) || !std::isfinite(a.altitude)) invalid("uav.altitude", "must be > 0");
  if (!(a.tx_power >= 0) || !std::isfinite(a.tx_power)) invalid("uav.tx_power", "must be >= 0");
  if (!(a.max_speed > 0) || !std::isfinite(a.max_speed))
    invalid("uav.max_speed", "must be > 0");
  if (!finite2(a.start)) invalid("uav.start", "must be finite");
  if (!finite2(a.end)) invalid("uav.end", "must be finite");

  const auto& ph = s.physics;
  if (!(ph.eh_efficiency > 0 && ph.eh_efficiency <= 1))
    invalid("physics.eh_efficiency", "out of (0,1]");
  if (!(ph.ref_gain > 0) || !std::isfinite(ph.ref_gain)) invalid("physics.ref_gain", "must be > 0");
  if (!(ph.bandwidth > 0) || !std::isfinite(ph.bandwidth))
    invalid("physics.bandwidth_hz", "must be > 0");
  if (!(ph.noise_power > 0) || !std::isfinite(ph.noise_power))
    invalid("physics.noise_power_w", "must be > 0");

  if (!(s.grid.horizon > 0) || !std::isfinite(s.grid.horizon))
    invalid("grid.horizon_s", "must be > 0");
  if (s.grid.slots < 1) invalid("grid.slots", "must be >= 1");

  const auto& st = s.solver;
  for (auto [name, v] : {std::pair{"tol_outer", st.tol_outer},
                         {"tol_trajectory", st.tol_trajectory},
                         {"tol_mode", st.tol_mode},
                         {"dual_tol", st.dual_tol},
                         {"bisection_tol", st.bisection_tol},
                         {"barrier_tol", st.barrier_tol},
                         {"subgradient_step", st.subgradient_step},
                         {"f_cap", st.f_cap},
                         {"p_cap", st.p_cap}}) {
    if (!(v > 0)) invalid(std::string("solver.") + name, "must be > 0");
  }
  if (!(st.barrier_shrink >= 0)) invalid("solver.barrier_shrink", "must be >= 0");
  for (auto [name, v] : {std::pair{"max_outer", st.max_outer},
                         {"max_sca", st.max_sca},
                         {"max_dual", st.max_dual},
                         {"max_mode", st.max_mode},
                         {"subgradient_iters", st.subgradient_iters}}) {
    if (v < 1) invalid(std::string("solver.") + name, "must be >= 1");
  }

  // The straight line is the shortest path; it fits iff every equal step does.
  const double dist = (a.end - a.start).norm();
  const double step = dist / s.grid.slots;
  const double used = st.paper_literal_speed ? step * step : step;
  if (used > s.step_budget() * (1 + 1e-12)) {
    std::ostringstream os;
    os << "endpoint unreachable: |q_F - q_0| = " << dist << " m exceeds the "
       << "flight budget over " << s.grid.slots << " slots";
    throw Error(ErrorCode::kInfeasible, os.str());
  }
}

Scenario load_scenario_string(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("scenario document: ") + e.what());
  }
  if (!root.is_object()) invalid("document", "must be an object");
  for (const auto& [key, _] : root.items()) {
    if (key != "users" && key != "uav" && key != "physics" && key != "grid" &&
        key != "solver")
      invalid(key, "is not a recognized top-level key");
  }

  Scenario s;
  if (!root.contains("users") || !root["users"].is_array())
    invalid("users", "must be an array");
  const auto& users = root["users"];
  for (std::size_t i = 0; i < users.size(); ++i) {
    const std::string p = "users[" + std::to_string(i) + "]";
    const auto& u = users[i];
    if (!u.is_object()) invalid(p, "must be an object");
    UserSpec spec;
    if (!u.contains("position")) invalid(p + ".position", "is required");
    spec.position = read_point(u["position"], p + ".position");
    spec.weight = read_number(u, "weight", p);
    spec.overhead_factor = read_number_or(u, "overhead_factor", p, spec.overhead_factor);
    spec.cpu_cycles_per_bit =
        read_number_or(u, "cpu_cycles_per_bit", p, spec.cpu_cycles_per_bit);
    spec.capacitance_coeff =
        read_number_or(u, "capacitance_coeff", p, spec.capacitance_coeff);
    s.users.push_back(spec);
  }

  const auto& uav = read_object(root, "uav");
  s.uav.altitude = read_number(uav, "altitude", "uav");
  s.uav.tx_power = read_number(uav, "tx_power", "uav");
  s.uav.max_speed = read_number(uav, "max_speed", "uav");
  if (!uav.contains("start")) invalid("uav.start", "is required");
  if (!uav.contains("end")) invalid("uav.end", "is required");
  s.uav.start = read_point(uav["start"], "uav.start");
  s.uav.end = read_point(uav["end"], "uav.end");

  const auto& ph = read_object(root, "physics");
  const bool has_db = ph.contains("ref_gain_db");
  const bool has_lin = ph.contains("ref_gain_linear");
  if (has_db && has_lin)
    invalid("physics.ref_gain", "given both as ref_gain_db and ref_gain_linear");
  if (!has_db && !has_lin) invalid("physics.ref_gain_db", "or ref_gain_linear is required");
  s.physics.ref_gain = has_db ? std::pow(10.0, read_number(ph, "ref_gain_db", "physics") / 10.0)
                              : read_number(ph, "ref_gain_linear", "physics");
  s.physics.eh_efficiency = read_number(ph, "eh_efficiency", "physics");
  s.physics.bandwidth = read_number(ph, "bandwidth_hz", "physics");
  s.physics.noise_power = read_number(ph, "noise_power_w", "physics");

  const auto& grid = read_object(root, "grid");
  s.grid.horizon = read_number(grid, "horizon_s", "grid");
  if (!grid.contains("slots") || !grid["slots"].is_number_integer())
    invalid("grid.slots", "must be an integer");
  s.grid.slots = grid["slots"].get<int>();

  if (root.contains("solver")) {
    if (!root["solver"].is_object()) invalid("solver", "must be an object");
    read_solver(root["solver"], s.solver);
  }
  validate_scenario(s);
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario_string(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json root;
  root["users"] = json::array();
  for (const auto& u : s.users) {
    root["users"].push_back({{"position", point_json(u.position)},
                             {"weight", u.weight},
                             {"overhead_factor", u.overhead_factor},
                             {"cpu_cycles_per_bit", u.cpu_cycles_per_bit},
                             {"capacitance_coeff", u.capacitance_coeff}});
  }
  root["uav"] = {{"altitude", s.uav.altitude},
                 {"tx_power", s.uav.tx_power},
                 {"max_speed", s.uav.max_speed},
                 {"start", point_json(s.uav.start)},
                 {"end", point_json(s.uav.end)}};
  root["physics"] = {{"ref_gain_linear", s.physics.ref_gain},
                     {"eh_efficiency", s.physics.eh_efficiency},
                     {"bandwidth_hz", s.physics.bandwidth},
                     {"noise_power_w", s.physics.noise_power}};
  root["grid"] = {{"horizon_s", s.grid.horizon}, {"slots", s.grid.slots}};
  const auto& st = s.solver;
  root["solver"] = {{"tol_outer", st.tol_outer},
                    {"tol_trajectory", st.tol_trajectory},
                    {"tol_mode", st.tol_mode},
                    {"max_outer", st.max_outer},
                    {"max_sca", st.max_sca},
                    {"max_dual", st.max_dual},
                    {"max_mode", st.max_mode},
                    {"dual_tol", st.dual_tol},
                    {"bisection_tol", st.bisection_tol},
                    {"barrier_tol", st.barrier_tol},
                    {"barrier_shrink", st.barrier_shrink},
                    {"dual_method", st.dual_method == DualMethod::kExact ? "exact" : "subgradient"},
                    {"subgradient_iters", st.subgradient_iters},
                    {"subgradient_step", st.subgradient_step},
                    {"f_cap", st.f_cap},
                    {"p_cap", st.p_cap},
                    {"paper_literal_speed", st.paper_literal_speed}};
  return root.dump(2);
}

Scenario default_paper_scenario() {
  Scenario s;
  const Vec2 positions[] = {{0, 0}, {0, 10}, {10, 10}, {10, 0}};
  const double weights[] = {0.1, 0.4, 0.3, 0.2};
  for (int m = 0; m < 4; ++m) {
    UserSpec u;
    u.position = positions[m];
    u.weight = weights[m];
    s.users.push_back(u);
  }
  s.physics.ref_gain = std::pow(10.0, -50.0 / 10.0);
  validate_scenario(s);
  return s;
}

Scenario circle_layout_scenario(const Scenario& base, int num_users) {
  if (num_users < 1) throw Error(ErrorCode::kInvalidArgument, "num_users must be >= 1");
  Scenario s = base;
  const UserSpec proto = base.users.empty() ? UserSpec{} : base.users.front();
  s.users.clear();
  const double radius = 5.0 * std::numbers::sqrt2;
  for (int k = 0; k < num_users; ++k) {
    const double angle = 1.25 * std::numbers::pi - 2.0 * std::numbers::pi * k / num_users;
    UserSpec u = proto;
    double x = 5.0 + radius * std::cos(angle);
    double y = 5.0 + radius * std::sin(angle);
    // Snap round-off so the square corners come out exact.
    if (std::abs(x - std::round(x)) < 1e-12) x = std::round(x);
    if (std::abs(y - std::round(y)) < 1e-12) y = std::round(y);
    u.position = {x, y};
    u.weight = 1.0 / num_users;
    s.users.push_back(u);
  }
  validate_scenario(s);
  return s;
}

std::uint64_t scenario_fingerprint(const Scenario& s) {
  const std::string text = serialize_scenario(s);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace uavmec
