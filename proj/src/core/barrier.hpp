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

#include <vector>

#include <Eigen/Core>

#include "core/scenario.hpp"

namespace uavmec {

// weight * |x_i - x_k - anchor|^2 over 2-D blocks of the stacked variable;
// k < 0 drops the second block.
struct QuadTerm {
  int i = 0;
  int k = -1;
  double weight = 0.0;
  Vec2 anchor{0.0, 0.0};
};

// sum of terms + constant.
struct QuadForm {
  std::vector<QuadTerm> terms;
  double constant = 0.0;

  double value(const Eigen::VectorXd& x) const;
  // Add the gradient into grad, and scale times the Hessian into hess.
  void accumulate(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const;
  void accumulate_hessian(double scale, Eigen::MatrixXd& hess) const;
};

// minimize objective(x) subject to constraints[j](x) <= 0, x in R^{2*blocks}.
struct QcqpProblem {
  int blocks = 0;
  QuadForm objective;
  std::vector<QuadForm> constraints;
};

struct BarrierSettings {
  double tol = 1e-8;      // stop once (number of constraints) / tau < tol
  double tau0 = 1.0;
  double tau_growth = 5.0;
  int max_newton = 100;   // per centering step
};

struct BarrierResult {
  Eigen::VectorXd x;
  bool feasible_start = false;
  bool converged = false;
  int newton_steps = 0;
  double duality_measure = 0.0;
};

// Log-barrier path following with damped Newton centering. x0 must be
// strictly feasible; otherwise x0 is returned with feasible_start = false.
BarrierResult solve_barrier(const QcqpProblem& p, const Eigen::VectorXd& x0,
                            const BarrierSettings& settings);

}  // namespace uavmec
