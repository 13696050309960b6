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

#include "irreg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "irreg/error.hpp"

namespace irreg {
namespace {

std::vector<double> SortedScores(const ImageRecord& image) {
  std::vector<double> scores;
  scores.reserve(image.proposals.size());
  for (const auto& p : image.proposals) {
    if (!p.score) {
      throw DataError("record " + image.id + ": proposal without score");
    }
    scores.push_back(*p.score);
  }
  if (scores.empty()) throw DataError("record " + image.id + ": no proposals");
  std::sort(scores.begin(), scores.end(), std::greater<>());
  return scores;
}

}  // namespace

double UnivariateGaussian::Pdf(double x) const {
  const double z = x - mean;
  return std::exp(-0.5 * z * z / variance) /
         std::sqrt(2 * std::numbers::pi * variance);
}

UnivariateGaussian UnivariateGaussian::FitMle(std::span<const double> samples) {
  if (samples.empty()) throw DataError("cannot fit a Gaussian to no samples");
  double mean = 0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.size());
  return {mean, std::max(var, kVarianceFloor)};
}

double PositiveNegativeRatio(const ImageRecord& image, std::size_t top_n) {
  const std::vector<double> scores = SortedScores(image);
  const std::size_t n = std::min(top_n, scores.size());
  const auto positives = static_cast<double>(
      std::count_if(scores.begin(), scores.begin() + static_cast<long>(n),
                    [](double s) { return s > 0; }));
  const double negatives = static_cast<double>(n) - positives;
  return (positives + 1) / (negatives + 1);
}

double PnRatioScore(const UnivariateGaussian& regular,
                    const UnivariateGaussian& other, const ImageRecord& image,
                    std::size_t top_n) {
  const double r = PositiveNegativeRatio(image, top_n);
  return -std::max(regular.Pdf(r), other.Pdf(r));
}

Detector TrainGlobalClassifier(const DatasetManifest& manifest,
                               const TrainConfig& cfg) {
  std::vector<LabeledBag> bags;
  for (const auto& record : manifest.records) {
    if (record.split != Split::kTrain) continue;
    int label = 0;
    if (record.status == Status::kRegular) label = 1;
    if (record.status == Status::kOther) label = -1;
    if (label == 0) continue;
    if (!record.global_feature) {
      throw DataError("record " + record.id + ": missing global feature");
    }
    bags.push_back({{std::span<const float>(*record.global_feature)}, label});
  }
  if (bags.empty()) throw DataError("no training images with global features");
  return TrainOnBags(bags, bags.front().instances.front().size(), cfg);
}

double GlobalLinearScore(const Detector& classifier, const ImageRecord& image) {
  if (!image.global_feature) {
    throw DataError("record " + image.id + ": missing global feature");
  }
  return -std::abs(classifier.Score(*image.global_feature));
}

double MaxProposalScore(const ImageRecord& image) {
  return SortedScores(image).front();
}

double MilMaxScore(const ImageRecord& image) {
  return -std::abs(MaxProposalScore(image));
}

double MilMaxGaussianScore(const UnivariateGaussian& regular,
                           const UnivariateGaussian& other,
                           const ImageRecord& image) {
  const double z = MaxProposalScore(image);
  return -std::max(regular.Pdf(z), other.Pdf(z));
}

double MilTopKScore(const ImageRecord& image, std::size_t k) {
  if (k == 0) throw DataError("top-k needs k >= 1");
  const std::vector<double> scores = SortedScores(image);
  const std::size_t n = std::min(k, scores.size());
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) sum += scores[i];
  return -std::abs(sum / static_cast<double>(n));
}

BaselineDensities FitBaselineDensities(const DatasetManifest& manifest,
                                       std::size_t top_n) {
  std::vector<double> ratio_reg, ratio_oth, max_reg, max_oth;
  for (const auto& record : manifest.records) {
    if (record.split != Split::kTrain) continue;
    if (record.status == Status::kRegular) {
      ratio_reg.push_back(PositiveNegativeRatio(record, top_n));
      max_reg.push_back(MaxProposalScore(record));
    } else if (record.status == Status::kOther) {
      ratio_oth.push_back(PositiveNegativeRatio(record, top_n));
      max_oth.push_back(MaxProposalScore(record));
    }
  }
  return {UnivariateGaussian::FitMle(ratio_reg),
          UnivariateGaussian::FitMle(ratio_oth),
          UnivariateGaussian::FitMle(max_reg),
          UnivariateGaussian::FitMle(max_oth)};
}

}  // namespace irreg
