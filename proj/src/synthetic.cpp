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

#include "irreg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <vector>

#include "irreg/error.hpp"
#include "irreg/geometry.hpp"

namespace irreg {
namespace {


std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class ImageSampler {
 public:
  ImageSampler(const SynthConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), rng_(seed) {}

  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double Normal(double sd) { return std::normal_distribution<double>(0, sd)(rng_); }

  BoundingBox RandomBox(double min_frac, double max_frac) {
    const double w = Uniform(min_frac, max_frac) * cfg_.width;
    const double h = Uniform(min_frac, max_frac) * cfg_.height;
    const double x = Uniform(0, cfg_.width - w);
    const double y = Uniform(0, cfg_.height - h);
    return {x, y, x + w, y + h};
  }

  BoundingBox Jittered(const BoundingBox& obj) {
    const double jitter = Uniform(cfg_.min_jitter, cfg_.max_jitter);
    const double sw = jitter * (obj.x2 - obj.x1);
    const double sh = jitter * (obj.y2 - obj.y1);
    for (;;) {
      BoundingBox b{std::clamp(obj.x1 + Normal(sw), 0.0, cfg_.width),
                    std::clamp(obj.y1 + Normal(sh), 0.0, cfg_.height),
                    std::clamp(obj.x2 + Normal(sw), 0.0, cfg_.width),
                    std::clamp(obj.y2 + Normal(sh), 0.0, cfg_.height)};
      if (b.x2 - b.x1 > 1 && b.y2 - b.y1 > 1) return b;
    }
  }

  std::vector<float> Feature(double score) {
    std::vector<float> f(static_cast<std::size_t>(cfg_.feature_dim));
    for (auto& v : f) v = static_cast<float>(Normal(cfg_.score_noise));
    f[0] += static_cast<float>(score);
    return f;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  const SynthConfig& cfg_;
  std::mt19937_64 rng_;
};

// Negates the scores of a random share of the positive proposals touching one
// half of the object.
bool BreakObject(ImageSampler& sampler, const BoundingBox& obj,
                 double flip_fraction, std::vector<Proposal>* proposals) {
  const double mx = 0.5 * (obj.x1 + obj.x2);
  const double my = 0.5 * (obj.y1 + obj.y2);
  const int side = std::uniform_int_distribution<int>(0, 3)(sampler.rng());
  BoundingBox part = obj;
  if (side == 0) part.x2 = mx;
  if (side == 1) part.x1 = mx;
  if (side == 2) part.y2 = my;
  if (side == 3) part.y1 = my;

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < proposals->size(); ++i) {
    const Proposal& p = (*proposals)[i];
    if (*p.score > 0 && IntersectionArea(p.box, part) > 0) {
      candidates.push_back(i);
    }
  }
  std::shuffle(candidates.begin(), candidates.end(), sampler.rng());
  // Flip the first candidate that has a heavily overlapping candidate partner
  // and keep that partner intact, so that the image always holds an
  // opposite-sign pair.
  bool paired = false;
  for (std::size_t i = 0; i < candidates.size() && !paired; ++i) {
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      if (j == i || Chi2Overlap((*proposals)[candidates[i]].box,
                                (*proposals)[candidates[j]].box) <= 0.8) {
        continue;
      }
      std::swap(candidates[0], candidates[i]);
      const std::size_t partner = j == 0 ? i : j;
      std::swap(candidates[partner], candidates.back());
      paired = true;
      break;
    }
  }
  if (!paired) return false;
  const auto n_flip = static_cast<std::size_t>(
      std::ceil(flip_fraction * static_cast<double>(candidates.size())));
  for (std::size_t k = 0; k < n_flip && k + 1 < candidates.size(); ++k) {
    auto& score = (*proposals)[candidates[k]].score;
    *score = -*score;
  }
  return true;
}

ImageRecord MakeImage(const SynthConfig& cfg, std::uint64_t seed,
                      Status status, Split split, std::string id) {
  ImageSampler sampler(cfg, seed);
  ImageRecord record;
  record.id = std::move(id);
  record.class_name = cfg.class_name;
  record.status = status;
  record.split = split;
  record.width = cfg.width;
  record.height = cfg.height;

  const int total = cfg.proposals_per_image;
  if (status == Status::kOther) {
    for (int i = 0; i < total; ++i) {
      Proposal p;
      p.box = sampler.RandomBox(0.1, 0.6);
      p.score = -3.0 + sampler.Normal(cfg.score_noise);
      record.proposals.push_back(std::move(p));
    }
  } else {
    // Irregular images are redrawn until the break leaves an opposite-sign
    // pair; the sampler stream keeps this deterministic.
    for (bool done = false; !done;) {
      record.proposals.clear();
      const BoundingBox obj = sampler.RandomBox(0.3, 0.6);
      const int n_obj = static_cast<int>(std::lround(
          sampler.Uniform(cfg.min_object_fraction, cfg.max_object_fraction) *
          total));
      for (int i = 0; i < total; ++i) {
        Proposal p;
        p.box = i < n_obj ? sampler.Jittered(obj) : sampler.RandomBox(0.1, 0.5);
        p.score = 3.0 * Iou(p.box, obj) - 1.0 + sampler.Normal(cfg.score_noise);
        record.proposals.push_back(std::move(p));
      }
      std::shuffle(record.proposals.begin(), record.proposals.end(),
                   sampler.rng());
      done = status != Status::kIrregular ||
             BreakObject(sampler, obj, cfg.irregular_flip_fraction,
                         &record.proposals);
    }
  }

  std::vector<double> global(static_cast<std::size_t>(cfg.feature_dim), 0.0);
  for (auto& p : record.proposals) {
    p.feature = sampler.Feature(*p.score);
    for (std::size_t d = 0; d < global.size(); ++d) global[d] += (*p.feature)[d];
  }
  record.global_feature.emplace();
  for (double g : global) {
    record.global_feature->push_back(static_cast<float>(g / total));
  }
  return record;
}

}  // namespace

DatasetManifest GenerateSynthetic(const SynthConfig& cfg) {
  if (cfg.images_per_status < 0 || cfg.proposals_per_image <= 0 ||
      cfg.feature_dim <= 0 || cfg.width <= 0 || cfg.height <= 0 ||
      cfg.score_noise <= 0 || cfg.irregular_flip_fraction <= 0 ||
      cfg.irregular_flip_fraction >= 1 || cfg.min_object_fraction < 0 ||
      cfg.min_object_fraction > cfg.max_object_fraction ||
      cfg.max_object_fraction > 1 || cfg.min_jitter < 0 ||
      cfg.min_jitter > cfg.max_jitter) {
    throw DataError("invalid synthetic configuration");
  }
  struct Cell {
    Split split;
    Status status;
  };
  const Cell cells[] = {{Split::kTrain, Status::kRegular},
                        {Split::kTrain, Status::kOther},
                        {Split::kTest, Status::kRegular},
                        {Split::kTest, Status::kIrregular},
                        {Split::kTest, Status::kOther}};
  DatasetManifest manifest;
  manifest.class_name = cfg.class_name;
  manifest.feature_dim = static_cast<std::size_t>(cfg.feature_dim);
  std::uint64_t index = 0;
  for (const Cell& cell : cells) {
    for (int i = 0; i < cfg.images_per_status; ++i, ++index) {
      char id[96];
      std::snprintf(id, sizeof(id), "%s-%s-%04d",
                    std::string(SplitName(cell.split)).c_str(),
                    std::string(StatusName(cell.status)).c_str(), i);
      manifest.records.push_back(MakeImage(cfg, SplitMix64(cfg.seed ^ SplitMix64(index)),
                                           cell.status, cell.split, id));
    }
  }
  return manifest;
}

std::map<std::string, int> OracleLabels(const DatasetManifest& manifest) {
  std::map<std::string, int> labels;
  for (const auto& r : manifest.records) {
    labels[r.id] = r.status == Status::kIrregular ? 1 : -1;
  }
  return labels;
}

}  // namespace irreg
