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

#ifndef IRREG_MIL_DETECTOR_HPP_
#define IRREG_MIL_DETECTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "irreg/dataset.hpp"

namespace irreg {

// Linear region detector: score(x) = w^T x + b.
struct Detector {
  std::vector<double> w;
  double b = 0;

  double Score(std::span<const float> x) const;

  friend bool operator==(const Detector&, const Detector&) = default;
};

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 30;
  int batch_size = 8;
  std::uint64_t seed = 1;
  double weight_decay = 1e-4;
};

// A multiple-instance bag: one image's instance features and its label
// (+1 contains the object, -1 does not).
struct LabeledBag {
  std::vector<std::span<const float>> instances;
  int label = 1;
};

struct BagGradient {
  std::vector<double> w;
  double b = 0;
};

// Max-pooled logistic loss log(1 + exp(-y max_j (w^T x_j + b))).
double BagLoss(const Detector& detector, const LabeledBag& bag);
double BagLoss(const Detector& detector, const ImageRecord& image, int label);

// Subgradient of BagLoss routed through the first argmax instance.
BagGradient BagLossGradient(const Detector& detector, const LabeledBag& bag);
BagGradient BagLossGradient(const Detector& detector, const ImageRecord& image,
                            int label);

// Bag view over an image's proposal features. Throws DataError when the image
// has no featured proposals or a proposal lacks its feature.
LabeledBag MakeBag(const ImageRecord& image, int label);

// Minibatch SGD over shuffled bags with L2 weight decay on w, starting from
// w = 0, b = 0. The visiting order depends only on cfg.seed. When
// `epoch_losses` is non-null it receives the mean bag loss of every epoch.
Detector TrainOnBags(std::span<const LabeledBag> bags, std::size_t dim,
                     const TrainConfig& cfg,
                     std::vector<double>* epoch_losses = nullptr);

// Trains on the train split: regular images are positive bags, other-class
// images negative ones.
Detector TrainDetector(const DatasetManifest& manifest, const TrainConfig& cfg,
                       std::vector<double>* epoch_losses = nullptr);

ImageRecord ScoreProposals(const Detector& detector, ImageRecord image);
DatasetManifest ScoreManifest(const Detector& detector,
                              DatasetManifest manifest);

// Proposals sorted by descending score, ties kept in ingestion order, cut to
// at most n. Throws DataError if a proposal has no score.
std::vector<Proposal> TopNProposals(const ImageRecord& image, std::size_t n);

// JSON: {"format": "irreg-detector", "version": 1, "dim": D, "w": [...],
// "b": b}.
void SaveDetector(const Detector& detector, const std::filesystem::path& path);
Detector LoadDetector(const std::filesystem::path& path);

}  // namespace irreg

#endif  // IRREG_MIL_DETECTOR_HPP_
