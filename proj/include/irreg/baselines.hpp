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

#ifndef IRREG_BASELINES_HPP_
#define IRREG_BASELINES_HPP_

#include <cstddef>
#include <span>

#include "irreg/dataset.hpp"
#include "irreg/mil_detector.hpp"

namespace irreg {

// All baseline scores follow the convention "higher = more irregular".

struct UnivariateGaussian {
  double mean = 0;
  double variance = 1;

  double Pdf(double x) const;

  // Maximum-likelihood fit (population variance) with variance floored at
  // kVarianceFloor. Throws DataError on an empty sample.
  static UnivariateGaussian FitMle(std::span<const double> samples);
  static constexpr double kVarianceFloor = 1e-12;
};

// (#positive + 1) / (#negative + 1) over the top-n proposals, where positive
// means score > 0.
double PositiveNegativeRatio(const ImageRecord& image, std::size_t top_n = 20);

double PnRatioScore(const UnivariateGaussian& regular,
                    const UnivariateGaussian& other, const ImageRecord& image,
                    std::size_t top_n = 20);

// Image-level linear classifier on global features: regular = +1,
// other = -1, L2-regularized logistic loss (a bag of one instance per image).
Detector TrainGlobalClassifier(const DatasetManifest& manifest,
                               const TrainConfig& cfg);

// -|w^T g + b| for the global feature g.
double GlobalLinearScore(const Detector& classifier, const ImageRecord& image);

double MaxProposalScore(const ImageRecord& image);
double MilMaxScore(const ImageRecord& image);

double MilMaxGaussianScore(const UnivariateGaussian& regular,
                           const UnivariateGaussian& other,
                           const ImageRecord& image);

// -|mean of the top min(k, count) scores|.
double MilTopKScore(const ImageRecord& image, std::size_t k = 20);

// Gaussians of the training statistics used by the two density baselines.
struct BaselineDensities {
  UnivariateGaussian ratio_regular;
  UnivariateGaussian ratio_other;
  UnivariateGaussian max_regular;
  UnivariateGaussian max_other;
};

BaselineDensities FitBaselineDensities(const DatasetManifest& manifest,
                                       std::size_t top_n = 20);

}  // namespace irreg

#endif  // IRREG_BASELINES_HPP_
