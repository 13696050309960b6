/*
 * Copyright 2026 The irreg Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "irreg/bfgs.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "irreg/error.hpp"

namespace irreg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double SafeEval(const Objective& objective, const Eigen::VectorXd& x,
                Eigen::VectorXd* grad) {
  try {
    const double f = objective(x, grad);
    if (!std::isfinite(f) || !grad->allFinite()) return kInf;
    return f;
  } catch (const NumericalError&) {
    return kInf;
  }
}

}  // namespace

BfgsResult MinimizeBfgs(const Objective& objective, Eigen::VectorXd x0,
                        const BfgsOptions& options) {
  const Eigen::Index n = x0.size();
  BfgsResult result;
  result.x = std::move(x0);
  Eigen::VectorXd grad(n);
  result.f = SafeEval(objective, result.x, &grad);
  result.evaluations = 1;
  if (!std::isfinite(result.f)) {
    throw NumericalError("objective is not finite at the starting point");
  }
  if (options.max_iters <= 0) return result;

  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd trial_grad(n);
  for (int iter = 0; iter < options.max_iters; ++iter) {
    if (grad.lpNorm<Eigen::Infinity>() < options.grad_tol) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd direction = -inv_hessian * grad;
    double slope = grad.dot(direction);
    if (!(slope < 0)) {
      // Lost descent; restart from steepest descent.
      inv_hessian.setIdentity();
      direction = -grad;
      slope = grad.dot(direction);
    }
    const double dir_norm = direction.lpNorm<Eigen::Infinity>();
    double step = dir_norm > options.max_step ? options.max_step / dir_norm : 1.0;

    bool accepted = false;
    Eigen::VectorXd trial;
    double trial_f = kInf;
    for (int k = 0; k < options.max_backtracks; ++k) {
      trial = result.x + step * direction;
      trial_f = SafeEval(objective, trial, &trial_grad);
      ++result.evaluations;
      if (trial_f <= result.f + 1e-4 * step * slope && trial_f < result.f) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = trial - result.x;
    const Eigen::VectorXd y = trial_grad - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (iter == 0) inv_hessian *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left =
          Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
      inv_hessian = left * inv_hessian * left.transpose() +
                    rho * s * s.transpose();
    }
    const double improvement = result.f - trial_f;
    result.x = trial;
    result.f = trial_f;
    grad = trial_grad;
    result.iterations = iter + 1;
    if (improvement <= options.f_rel_tol * std::max(1.0, std::abs(result.f))) {
      result.converged = true;
      break;
    }
  }
  if (grad.lpNorm<Eigen::Infinity>() < options.grad_tol) result.converged = true;
  return result;
}

}  // namespace irreg
