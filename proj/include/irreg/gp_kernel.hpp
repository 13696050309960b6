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

#ifndef IRREG_GP_KERNEL_HPP_
#define IRREG_GP_KERNEL_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "irreg/dataset.hpp"
#include "irreg/geometry.hpp"

namespace irreg {

// Hyperparameters of one generative model: constant mean, ARD weights of the
// inter-image kernel, and the weights of the inner (a) and inter (b) terms.
// `jitter` is added to covariance diagonals and is never optimized.
struct GpHyperParams {
  double mu = 0;
  std::array<double, 2> gamma{1.0, 1.0};
  double a = 0.5;
  double b = 0.5;
  double jitter = 0;

  friend bool operator==(const GpHyperParams&, const GpHyperParams&) = default;
};

// One proposal as seen by the GP. Points sharing `group` come from the same
// image, which switches on the inner-image term between them.
struct GpPoint {
  ProposalRepr repr;
  BoundingBox box;
  double score = 0;
  std::int64_t group = 0;

  friend bool operator==(const GpPoint&, const GpPoint&) = default;
};

// Retained training proposals of one model, stored image by image;
// points[i].group indexes image_ids.
struct TrainingProposalSet {
  std::vector<std::string> image_ids;
  std::vector<GpPoint> points;

  friend bool operator==(const TrainingProposalSet&,
                         const TrainingProposalSet&) = default;
};

// exp(-1/2 (r1 - r2)^T diag(gamma) (r1 - r2))
double KInter(const ProposalRepr& r1, const ProposalRepr& r2,
              const std::array<double, 2>& gamma);

// a [same image] Chi2Overlap + b KInter. No jitter.
double KFull(const GpPoint& p, const GpPoint& q, const GpHyperParams& hyper);

// Gram matrix of KFull over `points`, plus hyper.jitter on the diagonal when
// `with_jitter` is set.
Eigen::MatrixXd AssembleGram(std::span<const GpPoint> points,
                             const GpHyperParams& hyper,
                             bool with_jitter = true);

struct FactoredGram {
  // Lower-triangular L with L L^T = gram + jitter I.
  Eigen::MatrixXd lower;
  double jitter = 0;
};

// Cholesky factor of gram + jitter I. Tries `initial_jitter` first and on
// failure escalates from max(10 initial_jitter, 1e-6 mean(diag)) by factors of
// ten up to 1e-2 mean(diag). Throws NumericalError naming the last jitter.
FactoredGram FactorGram(const Eigen::MatrixXd& gram, double initial_jitter);

// Jitter used when a model is first fitted: 1e-6 times the kernel's diagonal
// value a + b.
double DefaultJitter(const GpHyperParams& hyper);

// Top-n proposals of a scored image as GP points, each represented relative
// to the image's own maximum-scored proposal.
std::vector<GpPoint> ImageRegions(const ImageRecord& image, std::size_t top_n,
                                  std::int64_t group = 0);

// Train-split images of the given status, subsampled uniformly to at most
// max_images with a fixed seed and returned in ingestion order.
std::vector<const ImageRecord*> SelectTrainingImages(
    const DatasetManifest& manifest, Status status, std::size_t max_images,
    std::uint64_t seed);

TrainingProposalSet BuildTrainingSet(
    std::span<const ImageRecord* const> images, std::size_t top_n);

}  // namespace irreg

#endif  // IRREG_GP_KERNEL_HPP_
