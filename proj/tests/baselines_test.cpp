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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "irreg/baselines.hpp"
#include "irreg/error.hpp"

namespace irreg {
namespace {

using doctest::Approx;

ImageRecord WithScores(const std::vector<double>& scores) {
  ImageRecord r;
  r.id = "img";
  r.width = r.height = 100;
  for (double s : scores) r.proposals.push_back({{0, 0, 10, 10}, std::nullopt, s});
  return r;
}

TEST_CASE("positive negative ratio with Laplace smoothing") {
  CHECK(PositiveNegativeRatio(WithScores(std::vector<double>(20, 1.0))) == 21.0);
  CHECK(PositiveNegativeRatio(WithScores(std::vector<double>(20, -1.0))) ==
        Approx(1.0 / 21));
  // Only the 20 best proposals count.
  std::vector<double> mixed(20, 2.0);
  mixed.insert(mixed.end(), 30, -2.0);
  CHECK(PositiveNegativeRatio(WithScores(mixed), 20) == 21.0);
  CHECK(PositiveNegativeRatio(WithScores(mixed), 50) == Approx(21.0 / 31));
  // A score of exactly zero is not positive.
  CHECK(PositiveNegativeRatio(WithScores({0.0}), 20) == 0.5);
}

TEST_CASE("univariate Gaussian") {
  const UnivariateGaussian g{0, 1};
  CHECK(g.Pdf(0) == Approx(0.398942).epsilon(1e-6));
  const std::vector<double> samples{1, 2, 3, 4};
  const auto fit = UnivariateGaussian::FitMle(samples);
  CHECK(fit.mean == 2.5);
  CHECK(fit.variance == 1.25);
  const std::vector<double> same{7, 7, 7};
  CHECK(UnivariateGaussian::FitMle(same).variance ==
        UnivariateGaussian::kVarianceFloor);
  CHECK(std::isfinite(UnivariateGaussian::FitMle(same).Pdf(7)));
  CHECK_THROWS_AS(UnivariateGaussian::FitMle(std::span<const double>{}), DataError);
}

TEST_CASE("max and top-k scores") {
  const ImageRecord uniform = WithScores(std::vector<double>(25, -3.0));
  CHECK(MilTopKScore(uniform, 20) == -3.0);
  CHECK(MilMaxScore(uniform) == -3.0);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s(1 + rng() % 30);
    for (auto& v : s) v = n(rng);
    const ImageRecord img = WithScores(s);
    CHECK(MilTopKScore(img, 1) == MilMaxScore(img));
    CHECK(MilMaxScore(img) == -std::abs(*std::max_element(s.begin(), s.end())));
    std::shuffle(s.begin(), s.end(), rng);
    const ImageRecord shuffled = WithScores(s);
    CHECK(MilTopKScore(shuffled, 5) == Approx(MilTopKScore(img, 5)));
    CHECK(PositiveNegativeRatio(shuffled, 7) == PositiveNegativeRatio(img, 7));
  }
  CHECK_THROWS_AS(MilTopKScore(uniform, 0), DataError);
  ImageRecord unscored = uniform;
  unscored.proposals[3].score.reset();
  CHECK_THROWS_AS(MilMaxScore(unscored), DataError);
}

TEST_CASE("density scores negate the better fitting density") {
  const UnivariateGaussian reg{3, 1};
  const UnivariateGaussian oth{-3, 1};
  const ImageRecord img = WithScores({3.0, -1.0});
  CHECK(MilMaxGaussianScore(reg, oth, img) == Approx(-reg.Pdf(3)));
  const ImageRecord between = WithScores({0.0});
  CHECK(MilMaxGaussianScore(reg, oth, between) > MilMaxGaussianScore(reg, oth, img));
  const UnivariateGaussian rr{21, 4};
  const UnivariateGaussian ro{1.0 / 21, 0.01};
  CHECK(PnRatioScore(rr, ro, WithScores(std::vector<double>(20, 1.0))) ==
        Approx(-rr.Pdf(21)));
}

TEST_CASE("global linear score") {
  const Detector d{{1.0}, 0.0};
  ImageRecord img = WithScores({1.0});
  img.global_feature = std::vector<float>{0.0f};
  CHECK(GlobalLinearScore(d, img) == 0.0);
  img.global_feature = std::vector<float>{10.0f};
  CHECK(GlobalLinearScore(d, img) == -10.0);
  img.global_feature = std::vector<float>{-10.0f};
  CHECK(GlobalLinearScore(d, img) == -10.0);
  img.global_feature.reset();
  CHECK_THROWS_AS(GlobalLinearScore(d, img), DataError);
}

TEST_CASE("global classifier separates mean features") {
  DatasetManifest m = testing::SeparableBags(3, 40, 1, 4);
  for (auto& r : m.records) r.global_feature = r.proposals.front().feature;
  TrainConfig cfg;
  cfg.epochs = 50;
  const Detector d = TrainGlobalClassifier(m, cfg);
  int correct = 0;
  for (const auto& r : m.records) {
    const double s = d.Score(*r.global_feature);
    correct += (s > 0) == (r.status == Status::kRegular);
  }
  CHECK(correct >= 76);
}

TEST_CASE("baseline densities use training images only") {
  DatasetManifest m;
  auto add = [&](Status st, Split sp, double s) {
    ImageRecord r = WithScores({s});
    r.id = "r" + std::to_string(m.records.size());
    r.status = st;
    r.split = sp;
    m.records.push_back(r);
  };
  add(Status::kRegular, Split::kTrain, 2);
  add(Status::kRegular, Split::kTrain, 4);
  add(Status::kOther, Split::kTrain, -1);
  add(Status::kRegular, Split::kTest, 100);
  add(Status::kIrregular, Split::kTest, 50);
  const BaselineDensities d = FitBaselineDensities(m, 20);
  CHECK(d.max_regular.mean == 3);
  CHECK(d.max_regular.variance == 1);
  CHECK(d.max_other.mean == -1);
  CHECK(d.ratio_regular.mean == 2);
  CHECK(d.ratio_other.mean == 0.5);
}

}  // namespace
}  // namespace irreg
