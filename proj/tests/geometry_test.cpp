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

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "irreg/geometry.hpp"
#include "oracles.hpp"

namespace irreg {
namespace {

using doctest::Approx;

TEST_CASE("area") {
  CHECK(Area({0, 0, 2, 2}) == 4);
  CHECK(Area({0, 0, 1, 3}) == 3);
  CHECK(Area({0.5, 0.5, 2.5, 1.5}) == 2);
}

TEST_CASE("iou") {
  const BoundingBox a{0, 0, 2, 2};
  CHECK(Iou(a, a) == 1.0);
  CHECK(Iou(a, {5, 5, 6, 6}) == 0.0);
  // touching edges do not overlap
  CHECK(Iou(a, {2, 0, 4, 2}) == 0.0);
  CHECK(Iou(a, {1, 0, 3, 2}) == Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("chi2 overlap") {
  const BoundingBox a{0, 0, 2, 2};
  CHECK(Chi2Overlap(a, a) == 1.0);
  CHECK(Chi2Overlap(a, {5, 5, 6, 6}) == 0.0);
  CHECK(Chi2Overlap(a, {1, 0, 3, 2}) == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("proposal representation") {
  const BoundingBox m{10, 20, 40, 60};
  const ProposalRepr self = MakeProposalRepr(m, m, 100, 100);
  CHECK(self.iou_to_max == 1.0);
  CHECK(self.center_dist == 0.0);

  const ProposalRepr corner =
      MakeProposalRepr({0, 0, 10, 10}, {90, 90, 100, 100}, 100, 100);
  CHECK(corner.iou_to_max == 0.0);
  CHECK(corner.center_dist == Approx(0.9).epsilon(1e-14));

  const BoundingBox s{3, 7, 50, 40};
  const ProposalRepr r1 = MakeProposalRepr(s, m, 120, 80);
  const ProposalRepr r3 =
      MakeProposalRepr({9, 21, 150, 120}, {30, 60, 120, 180}, 360, 240);
  CHECK(r3.iou_to_max == Approx(r1.iou_to_max).epsilon(1e-14));
  CHECK(r3.center_dist == Approx(r1.center_dist).epsilon(1e-14));
}

TEST_CASE("chi2 overlap is symmetric, bounded and similarity invariant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> shift(-50, 50);
  std::uniform_real_distribution<double> scale(0.1, 10);
  for (int i = 0; i < 1000; ++i) {
    const BoundingBox a = testing::RandomBox(rng);
    const BoundingBox b = testing::RandomBox(rng);
    const double v = Chi2Overlap(a, b);
    CHECK(v == Chi2Overlap(b, a));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    const double c = scale(rng);
    const double tx = shift(rng);
    const double ty = shift(rng);
    auto move = [&](const BoundingBox& x) {
      return BoundingBox{c * x.x1 + tx, c * x.y1 + ty, c * x.x2 + tx,
                         c * x.y2 + ty};
    };
    CHECK(Chi2Overlap(move(a), move(b)) == Approx(v).epsilon(1e-9));
  }
}

TEST_CASE("chi2 overlap equals 2u/(1+u) and sits between iou and 2 iou") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 1000; ++i) {
    const BoundingBox a = testing::RandomBox(rng);
    const BoundingBox b = testing::RandomBox(rng);
    const double u = Iou(a, b);
    const double v = Chi2Overlap(a, b);
    CHECK(std::abs(v - 2 * u / (1 + u)) <= 1e-12);
    CHECK(u <= v + 1e-15);
    CHECK(v <= 2 * u + 1e-15);
  }
}

TEST_CASE("chi2 Gram matrices are positive semi-definite") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 50);
    std::vector<BoundingBox> boxes;
    for (int i = 0; i < n; ++i) boxes.push_back(testing::RandomBox(rng));
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) g(i, j) = Chi2Overlap(boxes[i], boxes[j]);
    }
    CHECK(testing::MinEigenvalue(g) >= -1e-8);
  }
}

}  // namespace
}  // namespace irreg
