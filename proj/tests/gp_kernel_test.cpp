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

#include "doctest.h"
#include "irreg/error.hpp"
#include "irreg/gp_kernel.hpp"
#include "oracles.hpp"

namespace irreg {
namespace {

using doctest::Approx;

GpHyperParams Hyper(double a, double b, double g0 = 1, double g1 = 1) {
  GpHyperParams h;
  h.a = a;
  h.b = b;
  h.gamma = {g0, g1};
  return h;
}

TEST_CASE("inter-image kernel") {
  const ProposalRepr r{0.4, 0.2};
  CHECK(KInter(r, r, {3, 5}) == 1.0);
  CHECK(KInter({1, 0}, {0, 0}, {2, 2}) ==
        Approx(0.36787944117144233).epsilon(1e-15));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 100; ++i) {
    const ProposalRepr a{u(rng), u(rng)};
    const ProposalRepr b{u(rng), u(rng)};
    const std::array<double, 2> g{0.1 + 5 * u(rng), 0.1 + 5 * u(rng)};
    CHECK(KInter(a, b, g) == KInter(b, a, g));
    CHECK(KInter(a, b, g) > 0.0);
    CHECK(KInter(a, b, g) <= 1.0);
  }
}

TEST_CASE("full kernel") {
  const GpPoint p{{1, 0}, {0, 0, 10, 10}, 0, 7};
  GpPoint q = p;
  CHECK(KFull(p, q, Hyper(0.5, 0.5)) == 1.0);
  q.group = 8;
  CHECK(KFull(p, q, Hyper(0.5, 0.5)) == 0.5);
  q.group = 7;
  q.box = {50, 50, 60, 60};
  CHECK(KFull(p, q, Hyper(0.5, 0.5)) == 0.5);
}

TEST_CASE("gram assembly") {
  const GpPoint p{{1, 0}, {0, 0, 10, 10}, 1.0, 0};
  GpHyperParams h = Hyper(0.3, 0.6);
  h.jitter = 0.01;
  const Eigen::MatrixXd one = AssembleGram(std::span(&p, 1), h);
  CHECK(one.rows() == 1);
  CHECK(one(0, 0) == Approx(0.91).epsilon(1e-15));

  const std::vector<GpPoint> two{p, {{1, 0}, {3, 3, 9, 9}, 2.0, 1}};
  const Eigen::MatrixXd g = AssembleGram(two, Hyper(0.3, 0.6), false);
  CHECK(g(0, 1) == Approx(0.6).epsilon(1e-15));
  CHECK(g(1, 0) == g(0, 1));
}

TEST_CASE("gram is PSD before jitter on random proposal sets") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.05, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 40);
    const auto pts = testing::RandomPoints(rng, n, 1 + static_cast<int>(rng() % 6));
    const Eigen::MatrixXd g =
        AssembleGram(pts, Hyper(u(rng), u(rng), u(rng), u(rng)), false);
    CHECK(g.isApprox(g.transpose(), 0.0));
    CHECK(testing::MinEigenvalue(g) >= -1e-8);
  }
}

TEST_CASE("factorization reconstructs the jittered gram") {
  std::mt19937_64 rng(3);
  const auto pts = testing::RandomPoints(rng, 30, 4);
  GpHyperParams h = Hyper(0.5, 0.5);
  h.jitter = 1e-6;
  const Eigen::MatrixXd g = AssembleGram(pts, h, false);
  const FactoredGram f = FactorGram(g, h.jitter);
  CHECK(f.jitter == 1e-6);
  Eigen::MatrixXd target = g;
  target.diagonal().array() += f.jitter;
  const Eigen::MatrixXd back = f.lower * f.lower.transpose();
  CHECK((back - target).norm() <= 1e-8 * target.norm());
  CHECK(f.lower.isLowerTriangular());
}

TEST_CASE("jitter escalates on singular grams") {
  // Two identical proposals in one image: rank one covariance.
  const GpPoint p{{1, 0}, {0, 0, 10, 10}, 0, 0};
  const std::vector<GpPoint> pts{p, p};
  const Eigen::MatrixXd g = AssembleGram(pts, Hyper(0.5, 0.5), false);
  const FactoredGram f = FactorGram(g, 0.0);
  CHECK(f.jitter >= 1e-6);
  CHECK(f.jitter <= 1e-2);
}

TEST_CASE("factorization failure reports the last jitter") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 0, 0, -1;
  try {
    FactorGram(bad, 0.0);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("jitter") != std::string::npos);
  }
}

TEST_CASE("image regions are relative to the image's own max proposal") {
  ImageRecord img;
  img.id = "i";
  img.width = 100;
  img.height = 100;
  img.proposals = {{{0, 0, 10, 10}, std::nullopt, 0.5},
                   {{90, 90, 100, 100}, std::nullopt, 2.0},
                   {{40, 40, 60, 60}, std::nullopt, -1.0}};
  const auto pts = ImageRegions(img, 2, 4);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].score == 2.0);
  CHECK(pts[0].repr == ProposalRepr{1, 0});
  CHECK(pts[1].repr.iou_to_max == 0.0);
  CHECK(pts[1].repr.center_dist == Approx(0.9).epsilon(1e-14));
  CHECK(pts[1].group == 4);

  img.proposals[0].score.reset();
  CHECK_THROWS_AS(ImageRegions(img, 2), DataError);
}

TEST_CASE("training image selection") {
  DatasetManifest m;
  for (int i = 0; i < 30; ++i) {
    ImageRecord r;
    r.id = "r" + std::to_string(i);
    r.status = i % 3 == 0 ? Status::kOther : Status::kRegular;
    r.split = i < 25 ? Split::kTrain : Split::kTest;
    r.width = r.height = 10;
    r.proposals = {{{1, 1, 5, 5}, std::nullopt, 1.0 * i}};
    m.records.push_back(r);
  }
  const auto all = SelectTrainingImages(m, Status::kRegular, 100, 1);
  CHECK(all.size() == 16);
  const auto some = SelectTrainingImages(m, Status::kRegular, 5, 1);
  REQUIRE(some.size() == 5);
  for (std::size_t i = 1; i < some.size(); ++i) CHECK(some[i - 1] < some[i]);
  for (const auto* r : some) {
    CHECK(r->status == Status::kRegular);
    CHECK(r->split == Split::kTrain);
  }
  CHECK(SelectTrainingImages(m, Status::kRegular, 5, 1) == some);

  const TrainingProposalSet set = BuildTrainingSet(some, 20);
  CHECK(set.image_ids.size() == 5);
  CHECK(set.points.size() == 5);
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    CHECK(set.points[i].group == static_cast<std::int64_t>(i));
    CHECK(set.image_ids[i] == some[i]->id);
  }
}

}  // namespace
}  // namespace irreg
