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

#include "uavmec/uavmec.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "core/drivers.hpp"
#include "core/error.hpp"
#include "core/experiments.hpp"
#include "core/scenario.hpp"
#include "core/verification.hpp"

struct uavmec_scenario {
  uavmec::Scenario value;
};

struct uavmec_report {
  uavmec::Scenario scenario;
  uavmec::SolveReport value;
};

struct uavmec_results {
  std::vector<uavmec::ExperimentResult> rows;
};

namespace {

thread_local std::string g_last_error;

uavmec_status map_code(uavmec::ErrorCode c) {
  switch (c) {
    case uavmec::ErrorCode::kInvalidArgument: return UAVMEC_ERR_INVALID_ARG;
    case uavmec::ErrorCode::kParse: return UAVMEC_ERR_PARSE;
    case uavmec::ErrorCode::kValidation: return UAVMEC_ERR_VALIDATION;
    case uavmec::ErrorCode::kInfeasible: return UAVMEC_ERR_INFEASIBLE;
    case uavmec::ErrorCode::kIo: return UAVMEC_ERR_IO;
    case uavmec::ErrorCode::kBudget: return UAVMEC_ERR_BUDGET;
    case uavmec::ErrorCode::kModeMismatch: return UAVMEC_ERR_MODE_MISMATCH;
  }
  return UAVMEC_ERR_INTERNAL;
}

uavmec_status fail(uavmec_status st, const std::string& msg) {
  g_last_error = msg;
  return st;
}

// Every entry point funnels C++ exceptions through here.
template <class F>
uavmec_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return UAVMEC_OK;
  } catch (const uavmec::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(UAVMEC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(UAVMEC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(UAVMEC_ERR_INTERNAL, "unknown failure");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need(const void* p, const char* what) {
  if (!p) throw uavmec::Error(uavmec::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

std::vector<uavmec::Scheme> schemes_of(const char* const* names, size_t n) {
  if (n > 0) need(names, "schemes");
  std::vector<uavmec::Scheme> out;
  for (size_t i = 0; i < n; ++i) {
    need(names[i], "scheme name");
    out.push_back(uavmec::parse_scheme(names[i]));
  }
  return out;
}

std::vector<uavmec::TrajectoryKind> kinds_of(const char* const* names, size_t n) {
  if (n > 0) need(names, "trajectories");
  std::vector<uavmec::TrajectoryKind> out;
  for (size_t i = 0; i < n; ++i) {
    need(names[i], "trajectory name");
    out.push_back(uavmec::parse_trajectory(names[i]));
  }
  return out;
}

}  // namespace

extern "C" {

const char* uavmec_last_error(void) { return g_last_error.c_str(); }

const char* uavmec_status_name(uavmec_status status) {
  switch (status) {
    case UAVMEC_OK: return "ok";
    case UAVMEC_ERR_INVALID_ARG: return "invalid argument";
    case UAVMEC_ERR_PARSE: return "parse error";
    case UAVMEC_ERR_VALIDATION: return "validation error";
    case UAVMEC_ERR_INFEASIBLE: return "infeasible";
    case UAVMEC_ERR_IO: return "i/o error";
    case UAVMEC_ERR_BUDGET: return "budget exceeded";
    case UAVMEC_ERR_MODE_MISMATCH: return "mode mismatch";
    case UAVMEC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* uavmec_version(void) { return "1.0.0"; }

void uavmec_string_free(char* text) { std::free(text); }

uavmec_status uavmec_scenario_load_file(const char* path, uavmec_scenario** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new uavmec_scenario{uavmec::load_scenario_file(path)};
  });
}

uavmec_status uavmec_scenario_load_string(const char* json, uavmec_scenario** out) {
  return guard([&] {
    need(json, "json");
    need(out, "out");
    *out = new uavmec_scenario{uavmec::load_scenario_string(json)};
  });
}

uavmec_status uavmec_scenario_default(uavmec_scenario** out) {
  return guard([&] {
    need(out, "out");
    *out = new uavmec_scenario{uavmec::default_paper_scenario()};
  });
}

void uavmec_overrides_init(uavmec_overrides* o) {
  if (!o) return;
  o->tx_power = std::nan("");
  o->slots = 0;
  o->num_users = 0;
  o->tol_outer = std::nan("");
  o->max_outer = 0;
  o->paper_literal_speed = -1;
}

uavmec_status uavmec_scenario_with_overrides(const uavmec_scenario* base,
                                             const uavmec_overrides* o, uavmec_scenario** out) {
  return guard([&] {
    need(base, "scenario");
    need(o, "overrides");
    need(out, "out");
    if (o->slots < 0 || o->num_users < 0 || o->max_outer < 0)
      throw uavmec::Error(uavmec::ErrorCode::kValidation, "override counts must be positive");
    uavmec::Scenario s = base->value;
    if (o->num_users > 0) s = uavmec::circle_layout_scenario(s, o->num_users);
    if (!std::isnan(o->tx_power)) s.uav.tx_power = o->tx_power;
    if (o->slots > 0) s.grid.slots = o->slots;
    if (!std::isnan(o->tol_outer)) s.solver.tol_outer = o->tol_outer;
    if (o->max_outer > 0) s.solver.max_outer = o->max_outer;
    if (o->paper_literal_speed >= 0) s.solver.paper_literal_speed = o->paper_literal_speed != 0;
    uavmec::validate_scenario(s);
    *out = new uavmec_scenario{std::move(s)};
  });
}

uavmec_status uavmec_scenario_to_json(const uavmec_scenario* s, char** out) {
  return guard([&] {
    need(s, "scenario");
    need(out, "out");
    *out = dup_string(uavmec::serialize_scenario(s->value));
  });
}

int uavmec_scenario_num_users(const uavmec_scenario* s) { return s ? s->value.num_users() : 0; }
int uavmec_scenario_num_slots(const uavmec_scenario* s) { return s ? s->value.num_slots() : 0; }
uint64_t uavmec_scenario_fingerprint(const uavmec_scenario* s) {
  return s ? uavmec::scenario_fingerprint(s->value) : 0;
}
void uavmec_scenario_free(uavmec_scenario* s) { delete s; }

uavmec_status uavmec_solve(const uavmec_scenario* s, const char* scheme, const char* trajectory,
                           uavmec_report** out) {
  return guard([&] {
    need(s, "scenario");
    need(scheme, "scheme");
    need(trajectory, "trajectory");
    need(out, "out");
    auto* r = new uavmec_report{s->value, {}};
    try {
      r->value = uavmec::run_scheme(s->value, uavmec::parse_scheme(scheme),
                                    uavmec::parse_trajectory(trajectory));
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

double uavmec_report_objective(const uavmec_report* r) { return r ? r->value.objective : 0.0; }
int uavmec_report_outer_iterations(const uavmec_report* r) {
  return r ? r->value.outer_iterations : 0;
}
int uavmec_report_converged(const uavmec_report* r) { return r && r->value.converged ? 1 : 0; }
int uavmec_report_cap_hit(const uavmec_report* r) { return r && r->value.cap_hit ? 1 : 0; }
double uavmec_report_total_seconds(const uavmec_report* r) {
  return r ? r->value.times.total_s : 0.0;
}
int uavmec_report_num_users(const uavmec_report* r) { return r ? r->scenario.num_users() : 0; }
int uavmec_report_num_slots(const uavmec_report* r) { return r ? r->scenario.num_slots() : 0; }

uavmec_status uavmec_report_user_bits(const uavmec_report* r, double* out, size_t len) {
  return guard([&] {
    need(r, "report");
    if (len > 0) need(out, "out");
    const auto& b = r->value.user_bits;
    for (size_t i = 0; i < len && i < static_cast<size_t>(b.size()); ++i) out[i] = b[i];
  });
}

size_t uavmec_report_trace_length(const uavmec_report* r) {
  return r ? r->value.objective_trace.size() : 0;
}

uavmec_status uavmec_report_trace(const uavmec_report* r, double* out, size_t len) {
  return guard([&] {
    need(r, "report");
    if (len > 0) need(out, "out");
    const auto& t = r->value.objective_trace;
    for (size_t i = 0; i < len && i < t.size(); ++i) out[i] = t[i];
  });
}

uavmec_status uavmec_report_waypoints(const uavmec_report* r, double* xy, size_t len) {
  return guard([&] {
    need(r, "report");
    need(xy, "xy");
    const auto& wp = r->value.traj.waypoints;
    if (len < 2 * wp.size())
      throw uavmec::Error(uavmec::ErrorCode::kInvalidArgument,
                          "waypoint buffer needs " + std::to_string(2 * wp.size()) + " doubles");
    for (size_t i = 0; i < wp.size(); ++i) {
      xy[2 * i] = wp[i].x();
      xy[2 * i + 1] = wp[i].y();
    }
  });
}

uavmec_status uavmec_report_allocation(const uavmec_report* r, const char* which, double* out,
                                       size_t len) {
  return guard([&] {
    need(r, "report");
    need(which, "which");
    need(out, "out");
    const auto& a = r->value.alloc;
    const std::string w = which;
    const uavmec::Matrix* mat = w == "f" ? &a.f : w == "P" ? &a.P : w == "t" ? &a.t
                              : w == "z" ? &a.z : nullptr;
    if (!mat)
      throw uavmec::Error(uavmec::ErrorCode::kInvalidArgument, "allocation must be f, P, t or z");
    if (len < static_cast<size_t>(mat->size()))
      throw uavmec::Error(uavmec::ErrorCode::kInvalidArgument,
                          "allocation buffer needs " + std::to_string(mat->size()) + " doubles");
    for (Eigen::Index m = 0; m < mat->rows(); ++m)
      for (Eigen::Index n = 0; n < mat->cols(); ++n) out[m * mat->cols() + n] = (*mat)(m, n);
  });
}

uavmec_status uavmec_report_assignment(const uavmec_report* r, int* out, size_t len) {
  return guard([&] {
    need(r, "report");
    if (!r->value.assignment)
      throw uavmec::Error(uavmec::ErrorCode::kInvalidArgument, "report has no binary assignment");
    if (len > 0) need(out, "out");
    const auto& rho = r->value.assignment->rho;
    for (size_t i = 0; i < len && i < static_cast<size_t>(rho.size()); ++i)
      out[i] = rho[i] > 0.5 ? 1 : 0;
  });
}

uavmec_status uavmec_report_to_json(const uavmec_report* r, int include_timings, char** out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    *out = dup_string(uavmec::report_to_json(r->value, r->scenario, include_timings != 0));
  });
}

uavmec_status uavmec_report_trajectory_csv(const uavmec_report* r, char** out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    *out = dup_string(uavmec::trajectory_csv(r->value));
  });
}

uavmec_status uavmec_report_trajectory_svg(const uavmec_report* r, char** out) {
  return guard([&] {
    need(r, "report");
    need(out, "out");
    *out = dup_string(uavmec::trajectory_svg(r->value, r->scenario));
  });
}

void uavmec_report_free(uavmec_report* r) { delete r; }

uavmec_status uavmec_compare(const uavmec_scenario* s, const char* const* schemes,
                             size_t num_schemes, const char* const* trajectories,
                             size_t num_trajectories, int workers, uavmec_results** out) {
  return guard([&] {
    need(s, "scenario");
    need(out, "out");
    auto rows = uavmec::compare(s->value, schemes_of(schemes, num_schemes),
                                kinds_of(trajectories, num_trajectories), workers);
    *out = new uavmec_results{std::move(rows)};
  });
}

uavmec_status uavmec_sweep(const uavmec_scenario* s, const char* variable, const double* values,
                           size_t num_values, const char* const* schemes, size_t num_schemes,
                           const char* const* trajectories, size_t num_trajectories, int workers,
                           uavmec_results** out) {
  return guard([&] {
    need(s, "scenario");
    need(variable, "variable");
    need(out, "out");
    if (num_values > 0) need(values, "values");
    uavmec::SweepOptions opt;
    opt.schemes = schemes_of(schemes, num_schemes);
    opt.trajectories = kinds_of(trajectories, num_trajectories);
    opt.workers = workers;
    auto rows = uavmec::sweep(s->value, uavmec::parse_sweep_variable(variable),
                              std::vector<double>(values, values + num_values), opt);
    *out = new uavmec_results{std::move(rows)};
  });
}

size_t uavmec_results_count(const uavmec_results* r) { return r ? r->rows.size() : 0; }

size_t uavmec_results_failed(const uavmec_results* r) {
  size_t n = 0;
  if (r)
    for (const auto& row : r->rows) n += row.error.empty() ? 0 : 1;
  return n;
}

uavmec_status uavmec_results_objective(const uavmec_results* r, size_t row, double* out) {
  return guard([&] {
    need(r, "results");
    need(out, "out");
    if (row >= r->rows.size())
      throw uavmec::Error(uavmec::ErrorCode::kInvalidArgument, "row index out of range");
    if (!r->rows[row].error.empty())
      throw uavmec::Error(uavmec::ErrorCode::kInfeasible, r->rows[row].error);
    *out = r->rows[row].objective;
  });
}

uavmec_status uavmec_results_csv(const uavmec_results* r, int include_timings, char** out) {
  return guard([&] {
    need(r, "results");
    need(out, "out");
    *out = dup_string(uavmec::results_csv(r->rows, include_timings != 0));
  });
}

uavmec_status uavmec_results_svg(const uavmec_results* r, char** out) {
  return guard([&] {
    need(r, "results");
    need(out, "out");
    *out = dup_string(uavmec::sweep_svg(r->rows));
  });
}

void uavmec_results_free(uavmec_results* r) { delete r; }

uavmec_status uavmec_oracle_check(double tolerance, int num_users, int instances, int* passed,
                                  char** report) {
  return guard([&] {
    need(passed, "passed");
    need(report, "report");
    if (!(tolerance >= 0.0))
      throw uavmec::Error(uavmec::ErrorCode::kInvalidArgument, "tolerance must be >= 0");
    uavmec::SuiteOptions opt;
    opt.tolerance = tolerance;
    opt.num_users = num_users;
    opt.instances = instances;
    const auto lines = uavmec::run_oracle_suite(opt);
    bool ok = true;
    for (const auto& l : lines) ok = ok && l.pass;
    *passed = ok ? 1 : 0;
    *report = dup_string(uavmec::format_checks(lines));
  });
}

uavmec_status uavmec_write_file(const char* path, const char* text) {
  return guard([&] {
    need(path, "path");
    need(text, "text");
    uavmec::write_text_file(path, text);
  });
}

}  // extern "C"
