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

#include "irreg/mil_detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "irreg/error.hpp"
#include "json.hpp"

namespace irreg {
namespace {

// log(1 + exp(x)) without overflow.
double Softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0) return 1 / (1 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1 + e);
}

struct MaxInstance {
  std::size_t index = 0;
  double score = 0;
};

MaxInstance ArgmaxInstance(const Detector& detector, const LabeledBag& bag) {
  if (bag.instances.empty()) throw DataError("bag has no instances");
  MaxInstance best{0, detector.Score(bag.instances[0])};
  for (std::size_t j = 1; j < bag.instances.size(); ++j) {
    const double s = detector.Score(bag.instances[j]);
    if (s > best.score) best = {j, s};
  }
  return best;
}

}  // namespace

double Detector::Score(std::span<const float> x) const {
  if (x.size() != w.size()) {
    throw DataError("feature length " + std::to_string(x.size()) +
                    " does not match detector dimension " +
                    std::to_string(w.size()));
  }
  double s = b;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
  return s;
}

LabeledBag MakeBag(const ImageRecord& image, int label) {
  LabeledBag bag;
  bag.label = label;
  bag.instances.reserve(image.proposals.size());
  for (const auto& p : image.proposals) {
    if (!p.feature) {
      throw DataError("record " + image.id + ": proposal without feature");
    }
    bag.instances.emplace_back(*p.feature);
  }
  if (bag.instances.empty()) {
    throw DataError("record " + image.id + ": no featured proposals");
  }
  return bag;
}

double BagLoss(const Detector& detector, const LabeledBag& bag) {
  const MaxInstance m = ArgmaxInstance(detector, bag);
  return Softplus(-bag.label * m.score);
}

double BagLoss(const Detector& detector, const ImageRecord& image, int label) {
  return BagLoss(detector, MakeBag(image, label));
}

BagGradient BagLossGradient(const Detector& detector, const LabeledBag& bag) {
  const MaxInstance m = ArgmaxInstance(detector, bag);
  const double y = bag.label;
  // d/dz log(1 + exp(-y z)) = -y sigma(-y z)
  const double scale = -y * Sigmoid(-y * m.score);
  BagGradient g;
  const auto x = bag.instances[m.index];
  g.w.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g.w[i] = scale * x[i];
  g.b = scale;
  return g;
}

BagGradient BagLossGradient(const Detector& detector, const ImageRecord& image,
                            int label) {
  return BagLossGradient(detector, MakeBag(image, label));
}

Detector TrainOnBags(std::span<const LabeledBag> bags, std::size_t dim,
                     const TrainConfig& cfg,
                     std::vector<double>* epoch_losses) {
  if (cfg.learning_rate <= 0 || cfg.batch_size <= 0 || cfg.epochs < 0 ||
      cfg.weight_decay < 0) {
    throw DataError("invalid training configuration");
  }
  const bool has_pos = std::any_of(bags.begin(), bags.end(),
                                   [](const auto& b) { return b.label > 0; });
  const bool has_neg = std::any_of(bags.begin(), bags.end(),
                                   [](const auto& b) { return b.label < 0; });
  if (!has_pos || !has_neg) {
    throw DataError("training needs both positive and negative bags");
  }

  Detector detector{std::vector<double>(dim, 0.0), 0.0};
  std::vector<std::size_t> order(bags.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);
  std::vector<double> grad_w(dim);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::fill(grad_w.begin(), grad_w.end(), 0.0);
      double grad_b = 0;
      for (std::size_t k = start; k < stop; ++k) {
        const LabeledBag& bag = bags[order[k]];
        const MaxInstance m = ArgmaxInstance(detector, bag);
        const double y = bag.label;
        loss_sum += Softplus(-y * m.score);
        const double scale = -y * Sigmoid(-y * m.score);
        const auto x = bag.instances[m.index];
        for (std::size_t i = 0; i < dim; ++i) grad_w[i] += scale * x[i];
        grad_b += scale;
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t i = 0; i < dim; ++i) {
        detector.w[i] -= cfg.learning_rate *
                         (grad_w[i] * inv + cfg.weight_decay * detector.w[i]);
      }
      detector.b -= cfg.learning_rate * grad_b * inv;
    }
    if (epoch_losses != nullptr) {
      epoch_losses->push_back(loss_sum / static_cast<double>(bags.size()));
    }
  }
  return detector;
}

Detector TrainDetector(const DatasetManifest& manifest, const TrainConfig& cfg,
                       std::vector<double>* epoch_losses) {
  if (manifest.feature_dim == 0) {
    throw DataError("dataset carries no proposal features");
  }
  std::vector<LabeledBag> bags;
  for (const auto& record : manifest.records) {
    if (record.split != Split::kTrain) continue;
    if (record.status == Status::kRegular) {
      bags.push_back(MakeBag(record, +1));
    } else if (record.status == Status::kOther) {
      bags.push_back(MakeBag(record, -1));
    }
  }
  return TrainOnBags(bags, manifest.feature_dim, cfg, epoch_losses);
}

ImageRecord ScoreProposals(const Detector& detector, ImageRecord image) {
  for (auto& p : image.proposals) {
    if (!p.feature) {
      throw DataError("record " + image.id + ": proposal without feature");
    }
    p.score = detector.Score(*p.feature);
  }
  return image;
}

DatasetManifest ScoreManifest(const Detector& detector,
                              DatasetManifest manifest) {
  for (auto& record : manifest.records) {
    record = ScoreProposals(detector, std::move(record));
  }
  return manifest;
}

std::vector<Proposal> TopNProposals(const ImageRecord& image, std::size_t n) {
  for (const auto& p : image.proposals) {
    if (!p.score) {
      throw DataError("record " + image.id + ": proposal without score");
    }
  }
  std::vector<Proposal> sorted = image.proposals;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Proposal& l, const Proposal& r) {
                     return *l.score > *r.score;
                   });
  if (sorted.size() > n) sorted.resize(n);
  return sorted;
}

void SaveDetector(const Detector& detector, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["format"] = "irreg-detector";
  j["version"] = 1;
  j["dim"] = detector.w.size();
  j["w"] = detector.w;
  j["b"] = detector.b;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write detector " + path.string());
  out << j.dump() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

Detector LoadDetector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open detector " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.at("format") != "irreg-detector" || j.at("version") != 1) {
      throw DataError(path.string() + ": not a version-1 detector file");
    }
    Detector d;
    d.w = j.at("w").get<std::vector<double>>();
    d.b = j.at("b").get<double>();
    if (d.w.size() != j.at("dim").get<std::size_t>()) {
      throw DataError(path.string() + ": dim does not match weight count");
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace irreg
