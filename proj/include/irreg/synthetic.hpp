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

#ifndef IRREG_SYNTHETIC_HPP_
#define IRREG_SYNTHETIC_HPP_

#include <cstdint>
#include <map>
#include <string>

#include "irreg/dataset.hpp"

namespace irreg {

struct SynthConfig {
  std::uint64_t seed = 2016;
  // Images per (split, status) cell: train regular/other and test
  // regular/irregular/other.
  int images_per_status = 100;
  double width = 256;
  double height = 256;
  int proposals_per_image = 40;
  int feature_dim = 32;
  double score_noise = 0.3;
  double irregular_flip_fraction = 0.5;
  // Range of the per-image share of proposals drawn around the object.
  double min_object_fraction = 0.1;
  double max_object_fraction = 0.95;
  // Range of the per-proposal jitter scale, relative to the object size.
  double min_jitter = 0.04;
  double max_jitter = 0.2;
  std::string class_name = "synthetic";
};

// Ground-truth dataset with planted detection scores.
//
// Regular images hold one object; a per-image share of the proposals are
// jittered copies of it and the rest are random background boxes. A
// proposal's planted score is 3 iou(proposal, object) - 1 + noise. Other-class
// images hold only background boxes scored -3 + noise. Irregular images (test
// split only) are regular images in which one half of the object is "broken":
// a random share of the positively scored proposals touching that half has
// its score negated, always including one member of a heavily overlapping
// (chi2 > 0.8) pair whose other member keeps its sign.
//
// Proposal features are score * e_0 + isotropic noise (sd score_noise), so a
// linear detector can recover the planted scores; the global feature is the
// mean proposal feature. Every image draws from its own sub-seed, so the
// output depends only on cfg.
DatasetManifest GenerateSynthetic(const SynthConfig& cfg);

// +1 for irregular images, -1 otherwise.
std::map<std::string, int> OracleLabels(const DatasetManifest& manifest);

}  // namespace irreg

#endif  // IRREG_SYNTHETIC_HPP_
