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

#include <random>

#include "core/error.hpp"
#include "core/verification.hpp"

using namespace uavmec;

TEST_CASE("toy scenarios are valid and reproducible") {
  std::mt19937 a(9), b(9);
  for (int k = 0; k < 20; ++k) {
    const Scenario s = toy_scenario(1 + k % 2, 1 + k % 4, a);
    CHECK_NOTHROW(validate_scenario(s));
    CHECK(scenario_fingerprint(s) == scenario_fingerprint(toy_scenario(1 + k % 2, 1 + k % 4, b)));
    for (const auto& u : s.users) {
      CHECK(u.position.x() >= 0.0);
      CHECK(u.position.x() <= 10.0);
      CHECK(std::abs(u.position.y()) <= 2.5);
      CHECK(u.weight >= 0.3);
      CHECK(u.weight <= 1.3);
    }
    CHECK(s.physics.noise_power >= 1e-13);
    CHECK(s.physics.noise_power <= 1e-10);
  }
}

TEST_CASE("oracle suite passes on one and two users") {
  SuiteOptions o;
  o.instances = 3;
  o.seed = 2;
  const auto lines = run_oracle_suite(o);
  REQUIRE_FALSE(lines.empty());
  for (const auto& l : lines) {
    INFO(l.name << " residual " << l.residual << " tol " << l.tolerance);
    CHECK(l.pass);
    CHECK(l.residual <= l.tolerance);
  }
  const std::string text = format_checks(lines);
  CHECK(text.rfind("PASS ", 0) == 0);
  std::size_t count = 0;
  for (char c : text) count += c == '\n';
  CHECK(count == lines.size());
}

TEST_CASE("a zero tolerance cannot pass the gap checks") {
  SuiteOptions o;
  o.tolerance = 0.0;
  o.instances = 1;
  bool any_fail = false;
  for (const auto& l : run_oracle_suite(o)) any_fail = any_fail || !l.pass;
  CHECK(any_fail);
  CHECK(format_checks({{"x", 2.0, 1.0, false}}).rfind("FAIL x", 0) == 0);
}

TEST_CASE("suite refuses instances beyond the oracle budget") {
  SuiteOptions o;
  o.num_users = 3;
  try {
    run_oracle_suite(o);
    FAIL("expected a budget error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kBudget);
  }
  o.num_users = 0;
  CHECK_THROWS_AS(run_oracle_suite(o), Error);
}
