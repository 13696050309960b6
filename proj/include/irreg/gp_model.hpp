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

#ifndef IRREG_GP_MODEL_HPP_
#define IRREG_GP_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>

#include <Eigen/Core>

#include "irreg/dataset.hpp"
#include "irreg/gp_kernel.hpp"

namespace irreg {

// Optimized parameterization: (mu, log gamma0, log gamma1, log a, log b).
using HyperVector = Eigen::Matrix<double, 5, 1>;

HyperVector ToHyperVector(const GpHyperParams& hyper);
GpHyperParams FromHyperVector(const HyperVector& v, double jitter);

struct LogLikelihood {
  double value = 0;
  // Gradient with respect to HyperVector coordinates.
  HyperVector grad = HyperVector::Zero();
};

// log N(scores | mu 1, K + jitter I) and, when requested, its analytic
// gradient 1/2 tr((alpha alpha^T - K^-1) dK) (plus 1^T alpha for mu).
LogLikelihood LogMarginalLikelihood(std::span<const GpPoint> points,
                                    const GpHyperParams& hyper,
                                    bool with_gradient = true);

struct FitOptions {
  int max_iters = 100;
  double grad_tol = 1e-6;
};

struct FitResult {
  GpHyperParams hyper;
  double initial_nll = 0;
  double final_nll = 0;
  int iterations = 0;
};

// Minimizes the negative log marginal likelihood from `init` with BFGS in the
// HyperVector parameterization. init.jitter is held fixed. The result is never
// worse than `init`.
FitResult FitHyperparameters(std::span<const GpPoint> points,
                             const GpHyperParams& init,
                             const FitOptions& options = {});

// Starting point used for fitting: mu = +3 for the regular model and -3 for
// the other-class model, a = b = 0.5, gamma uniform in [0.1, 1] drawn from
// `seed`, and DefaultJitter.
GpHyperParams InitialHyperParams(Status model_status, std::uint64_t seed);

// A fitted generative model: hyperparameters, retained training proposals and
// the factorization of their covariance.
class GpModel {
 public:
  // Factors the training covariance under `hyper`. The stored jitter may
  // exceed hyper.jitter if factorization needed escalation.
  static GpModel Build(TrainingProposalSet train, const GpHyperParams& hyper);

  const GpHyperParams& hyper() const { return hyper_; }
  const TrainingProposalSet& train() const { return train_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double jitter() const { return hyper_.jitter; }

  // Binary file: the text line "IRREG-GP-MODEL 1\n" followed by
  // little-endian hyperparameters, image ids, training points, the packed
  // lower Cholesky factor and alpha.
  void Save(const std::filesystem::path& path) const;
  static GpModel Load(const std::filesystem::path& path);

 private:
  GpHyperParams hyper_;
  TrainingProposalSet train_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
};

// Fits hyperparameters on `train` and builds the model.
GpModel TrainGpModel(TrainingProposalSet train, const GpHyperParams& init,
                     const FitOptions& options = {},
                     FitResult* fit = nullptr);

// Log density of the scores of `test` (proposals of a single image) given the
// model's training scores. Cross covariances use the inter-image term only;
// the test block includes the inner-image term and the model jitter. Divided
// by test.size() when `per_proposal` is set.
double ConditionalLogLikelihood(const GpModel& model,
                                std::span<const GpPoint> test,
                                bool per_proposal = true);

struct ImageFit {
  double ll_regular = 0;
  double ll_other = 0;
};

ImageFit FitImage(const GpModel& regular, const GpModel& other,
                  const ImageRecord& image, std::size_t top_n);

// -max(ll_regular, ll_other): higher means more irregular.
double IrregularityScore(const GpModel& regular, const GpModel& other,
                         const ImageRecord& image, std::size_t top_n = 20);

}  // namespace irreg

#endif  // IRREG_GP_MODEL_HPP_
