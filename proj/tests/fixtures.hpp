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

// Small synthetic fixtures shared by unit and acceptance tests.

#ifndef IRREG_TESTS_FIXTURES_HPP_
#define IRREG_TESTS_FIXTURES_HPP_

#include <cstdint>
#include <random>
#include <string>

#include "irreg/dataset.hpp"

namespace irreg::testing {

// Linearly separable MIL bags: each positive bag holds exactly one instance
// near +e_0 among instances near -e_0; negative bags hold only instances near
// -e_0.
inline DatasetManifest SeparableBags(std::uint64_t seed, int bags_per_label,
                                     int instances, int dim,
                                     Split split = Split::kTrain,
                                     double noise = 0.1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, noise);
  std::uniform_int_distribution<int> slot(0, instances - 1);
  DatasetManifest m;
  m.class_name = "sep";
  m.feature_dim = static_cast<std::size_t>(dim);
  for (int label : {1, -1}) {
    for (int b = 0; b < bags_per_label; ++b) {
      ImageRecord r;
      r.id = std::string(label > 0 ? "pos" : "neg") + std::to_string(b) +
             (split == Split::kTrain ? "-tr" : "-te");
      r.class_name = "sep";
      r.status = label > 0 ? Status::kRegular : Status::kOther;
      r.split = split;
      r.width = 100;
      r.height = 100;
      const int hot = label > 0 ? slot(rng) : -1;
      for (int i = 0; i < instances; ++i) {
        Proposal p;
        p.box = {1.0 * i, 1.0 * i, 1.0 * i + 10, 1.0 * i + 10};
        std::vector<float> f(static_cast<std::size_t>(dim));
        for (auto& v : f) v = static_cast<float>(n(rng));
        f[0] += i == hot ? 1.0f : -1.0f;
        p.feature = std::move(f);
        r.proposals.push_back(std::move(p));
      }
      m.records.push_back(std::move(r));
    }
  }
  return m;
}

}  // namespace irreg::testing

#endif  // IRREG_TESTS_FIXTURES_HPP_
