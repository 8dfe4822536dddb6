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

#include "core/barrier.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

namespace uavmec {

namespace {

Vec2 block(const Eigen::VectorXd& x, int i) { return {x[2 * i], x[2 * i + 1]}; }

Vec2 residual(const QuadTerm& t, const Eigen::VectorXd& x) {
  Vec2 r = block(x, t.i) - t.anchor;
  if (t.k >= 0) r -= block(x, t.k);
  return r;
}

}  // namespace

double QuadForm::value(const Eigen::VectorXd& x) const {
  double v = constant;
  for (const auto& t : terms) v += t.weight * residual(t, x).squaredNorm();
  return v;
}

void QuadForm::accumulate(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
  for (const auto& t : terms) {
    const Vec2 r = 2.0 * t.weight * residual(t, x);
    grad.segment<2>(2 * t.i) += r;
    if (t.k >= 0) grad.segment<2>(2 * t.k) -= r;
  }
}

void QuadForm::accumulate_hessian(double scale, Eigen::MatrixXd& hess) const {
  for (const auto& t : terms) {
    const double w = 2.0 * t.weight * scale;
    for (int d = 0; d < 2; ++d) {
      hess(2 * t.i + d, 2 * t.i + d) += w;
      if (t.k >= 0) {
        hess(2 * t.k + d, 2 * t.k + d) += w;
        hess(2 * t.i + d, 2 * t.k + d) -= w;
        hess(2 * t.k + d, 2 * t.i + d) -= w;
      }
    }
  }
}

BarrierResult solve_barrier(const QcqpProblem& p, const Eigen::VectorXd& x0,
                            const BarrierSettings& settings) {
  const int dim = 2 * p.blocks;
  const int n_con = static_cast<int>(p.constraints.size());
  BarrierResult out;
  out.x = x0;

  Eigen::VectorXd slack(n_con);
  auto slacks_ok = [&](const Eigen::VectorXd& x) {
    for (int j = 0; j < n_con; ++j) {
      slack[j] = -p.constraints[j].value(x);
      if (!(slack[j] > 0.0)) return false;
    }
    return true;
  };
  if (!slacks_ok(x0)) return out;
  out.feasible_start = true;
  if (dim == 0) {
    out.converged = true;
    return out;
  }

  auto merit = [&](const Eigen::VectorXd& x, double tau, double& val) {
    if (!slacks_ok(x)) return false;
    val = tau * p.objective.value(x);
    for (int j = 0; j < n_con; ++j) val -= std::log(slack[j]);
    return true;
  };

  Eigen::VectorXd x = x0;
  Eigen::VectorXd grad(dim), cg(dim);
  Eigen::MatrixXd hess(dim, dim);
  Eigen::MatrixXd jac(n_con, dim);
  double tau = settings.tau0;
  for (;;) {
    for (int it = 0; it < settings.max_newton; ++it) {
      slacks_ok(x);
      grad.setZero();
      hess.setZero();
      p.objective.accumulate(x, grad);
      grad *= tau;
      p.objective.accumulate_hessian(tau, hess);
      for (int j = 0; j < n_con; ++j) {
        cg.setZero();
        p.constraints[j].accumulate(x, cg);
        const double inv = 1.0 / slack[j];
        grad += inv * cg;
        jac.row(j) = inv * cg.transpose();
        p.constraints[j].accumulate_hessian(inv, hess);
      }
      hess.noalias() += jac.transpose() * jac;
      const double reg = 1e-14 * std::max(hess.diagonal().maxCoeff(), 1e-300);
      hess.diagonal().array() += reg;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      const Eigen::VectorXd dx = ldlt.solve(-grad);
      const double decrement = -grad.dot(dx);
      ++out.newton_steps;
      if (!(decrement > 1e-9) || !dx.allFinite()) break;

      double f0 = 0.0;
      merit(x, tau, f0);
      double step = 1.0, f1 = 0.0;
      bool moved = false;
      // Steps below 1e-6 only chase roundoff in the merit value.
      for (; step >= 1e-6; step *= 0.5) {
        const Eigen::VectorXd trial = x + step * dx;
        if (merit(trial, tau, f1) && f1 <= f0 - 0.25 * step * decrement) {
          x = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    out.duality_measure = n_con / tau;
    if (out.duality_measure < settings.tol || n_con == 0) {
      out.converged = true;
      break;
    }
    if (out.newton_steps > 50 * settings.max_newton) break;
    tau *= settings.tau_growth;
  }
  out.x = x;
  return out;
}

}  // namespace uavmec
