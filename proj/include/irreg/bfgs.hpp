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

#ifndef IRREG_BFGS_HPP_
#define IRREG_BFGS_HPP_

#include <functional>

#include <Eigen/Core>

namespace irreg {

// Objective returning f(x) and writing grad f(x) into `grad`. Returning a
// non-finite value, or throwing irreg::NumericalError, marks x as infeasible;
// the line search then backtracks.
using Objective =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct BfgsOptions {
  int max_iters = 100;
  // Stop once the infinity norm of the gradient drops below this.
  double grad_tol = 1e-6;
  // Stop once an accepted step improves f by less than this (relative).
  double f_rel_tol = 1e-12;
  int max_backtracks = 40;
  // Cap on the infinity norm of any single step.
  double max_step = 2.0;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

// Dense BFGS on the inverse Hessian with Armijo backtracking. Only steps that
// decrease f are accepted, so the result is never worse than x0. A failed line
// search ends the run and returns the best iterate.
BfgsResult MinimizeBfgs(const Objective& objective, Eigen::VectorXd x0,
                        const BfgsOptions& options = {});

}  // namespace irreg

#endif  // IRREG_BFGS_HPP_
