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
#include <random>
#include <string>
#include <vector>

#include "core/scenario.hpp"

namespace uavmec {

struct CheckLine {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SuiteOptions {
  double tolerance = 0.01;  // relative gap against the oracle optimum
  int num_users = 2;        // toy instances use 1..num_users users
  int instances = 5;
  std::uint32_t seed = 1;
};

// Random toy instance: users on [0,10] x [-2.5,2.5], weights in [0.3,1.3],
// noise log-uniform in [1e-13, 1e-10] so both families stay competitive.
Scenario toy_scenario(int users, int slots, std::mt19937& rng);

// Solver against oracle: partial gap, binary gap, stationarity residuals and
// finite-difference cross-checks. Error{kBudget} beyond two users.
std::vector<CheckLine> run_oracle_suite(const SuiteOptions& opt);

std::string format_checks(const std::vector<CheckLine>& lines);

}  // namespace uavmec
