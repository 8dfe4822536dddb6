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

#ifndef UAVMEC_UAVMEC_H
#define UAVMEC_UAVMEC_H

#include <stddef.h>
#include <stdint.h>

#if defined(UAVMEC_BUILDING_LIBRARY)
#define UAVMEC_API __attribute__((visibility("default")))
#else
#define UAVMEC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uavmec_status {
  UAVMEC_OK = 0,
  UAVMEC_ERR_INVALID_ARG = 1,
  UAVMEC_ERR_PARSE = 2,
  UAVMEC_ERR_VALIDATION = 3,
  UAVMEC_ERR_INFEASIBLE = 4,
  UAVMEC_ERR_IO = 5,
  UAVMEC_ERR_BUDGET = 6,
  UAVMEC_ERR_MODE_MISMATCH = 7,
  UAVMEC_ERR_INTERNAL = 8
} uavmec_status;

typedef struct uavmec_scenario uavmec_scenario;
typedef struct uavmec_report uavmec_report;
typedef struct uavmec_results uavmec_results;

/* Message of the last failed call on this thread; never NULL. */
UAVMEC_API const char* uavmec_last_error(void);
UAVMEC_API const char* uavmec_status_name(uavmec_status status);
UAVMEC_API const char* uavmec_version(void);

/* Strings returned through char** are owned by the caller. */
UAVMEC_API void uavmec_string_free(char* text);

/* ---- scenarios ---- */

UAVMEC_API uavmec_status uavmec_scenario_load_file(const char* path, uavmec_scenario** out);
UAVMEC_API uavmec_status uavmec_scenario_load_string(const char* json, uavmec_scenario** out);
/* The reference four-user instance. */
UAVMEC_API uavmec_status uavmec_scenario_default(uavmec_scenario** out);

/* NaN doubles, zero counts and -1 flags keep the scenario value; anything
   else is applied and validated. */
typedef struct uavmec_overrides {
  double tx_power;
  int slots;
  int num_users; /* re-lays users on the circle layout */
  double tol_outer;
  int max_outer;
  int paper_literal_speed; /* -1 keep, 0 off, 1 on */
} uavmec_overrides;

UAVMEC_API void uavmec_overrides_init(uavmec_overrides* o);
UAVMEC_API uavmec_status uavmec_scenario_with_overrides(const uavmec_scenario* base,
                                                        const uavmec_overrides* o,
                                                        uavmec_scenario** out);
UAVMEC_API uavmec_status uavmec_scenario_to_json(const uavmec_scenario* s, char** out);
UAVMEC_API int uavmec_scenario_num_users(const uavmec_scenario* s);
UAVMEC_API int uavmec_scenario_num_slots(const uavmec_scenario* s);
UAVMEC_API uint64_t uavmec_scenario_fingerprint(const uavmec_scenario* s);
UAVMEC_API void uavmec_scenario_free(uavmec_scenario* s);

/* ---- single solves ---- */

/* scheme: partial | binary | local_only | offload_only
   trajectory: optimized | straight_line | semicircle */
UAVMEC_API uavmec_status uavmec_solve(const uavmec_scenario* s, const char* scheme,
                                      const char* trajectory, uavmec_report** out);

UAVMEC_API double uavmec_report_objective(const uavmec_report* r);
UAVMEC_API int uavmec_report_outer_iterations(const uavmec_report* r);
UAVMEC_API int uavmec_report_converged(const uavmec_report* r);
UAVMEC_API int uavmec_report_cap_hit(const uavmec_report* r);
UAVMEC_API double uavmec_report_total_seconds(const uavmec_report* r);
UAVMEC_API int uavmec_report_num_users(const uavmec_report* r);
UAVMEC_API int uavmec_report_num_slots(const uavmec_report* r);
/* Copies min(len, M) unweighted per-user bits. */
UAVMEC_API uavmec_status uavmec_report_user_bits(const uavmec_report* r, double* out, size_t len);
UAVMEC_API size_t uavmec_report_trace_length(const uavmec_report* r);
UAVMEC_API uavmec_status uavmec_report_trace(const uavmec_report* r, double* out, size_t len);
/* Interleaved x, y of the N + 1 waypoints; len must be >= 2 (N + 1). */
UAVMEC_API uavmec_status uavmec_report_waypoints(const uavmec_report* r, double* xy, size_t len);
/* Row-major M x N allocation matrix; which: f | P | t | z. */
UAVMEC_API uavmec_status uavmec_report_allocation(const uavmec_report* r, const char* which,
                                                  double* out, size_t len);
/* Offloading flag per user; UAVMEC_ERR_INVALID_ARG for non-binary reports. */
UAVMEC_API uavmec_status uavmec_report_assignment(const uavmec_report* r, int* out, size_t len);
UAVMEC_API uavmec_status uavmec_report_to_json(const uavmec_report* r, int include_timings,
                                               char** out);
UAVMEC_API uavmec_status uavmec_report_trajectory_csv(const uavmec_report* r, char** out);
UAVMEC_API uavmec_status uavmec_report_trajectory_svg(const uavmec_report* r, char** out);
UAVMEC_API void uavmec_report_free(uavmec_report* r);

/* ---- experiment grids ---- */

UAVMEC_API uavmec_status uavmec_compare(const uavmec_scenario* s, const char* const* schemes,
                                        size_t num_schemes, const char* const* trajectories,
                                        size_t num_trajectories, int workers,
                                        uavmec_results** out);
/* variable: uav_power | num_users */
UAVMEC_API uavmec_status uavmec_sweep(const uavmec_scenario* s, const char* variable,
                                      const double* values, size_t num_values,
                                      const char* const* schemes, size_t num_schemes,
                                      const char* const* trajectories, size_t num_trajectories,
                                      int workers, uavmec_results** out);
UAVMEC_API size_t uavmec_results_count(const uavmec_results* r);
UAVMEC_API size_t uavmec_results_failed(const uavmec_results* r);
UAVMEC_API uavmec_status uavmec_results_objective(const uavmec_results* r, size_t row,
                                                  double* out);
UAVMEC_API uavmec_status uavmec_results_csv(const uavmec_results* r, int include_timings,
                                            char** out);
UAVMEC_API uavmec_status uavmec_results_svg(const uavmec_results* r, char** out);
UAVMEC_API void uavmec_results_free(uavmec_results* r);

/* ---- verification ---- */

/* Runs the toy oracle suite. *passed is 1 when every check is within
   tolerance; *report gets one PASS/FAIL line per check. */
UAVMEC_API uavmec_status uavmec_oracle_check(double tolerance, int num_users, int instances,
                                             int* passed, char** report);

UAVMEC_API uavmec_status uavmec_write_file(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif /* UAVMEC_UAVMEC_H */
