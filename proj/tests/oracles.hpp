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

// Independent reference computations for tests. Nothing here calls into the
// code paths it is used to check.

#ifndef IRREG_TESTS_ORACLES_HPP_
#define IRREG_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "irreg/dataset.hpp"
#include "irreg/gp_kernel.hpp"

namespace irreg::testing {

inline BoundingBox RandomBox(std::mt19937_64& rng, double extent = 100.0) {
  std::uniform_real_distribution<double> pos(0.0, extent);
  std::uniform_real_distribution<double> size(1.0, 0.5 * extent);
  const double x = pos(rng);
  const double y = pos(rng);
  return {x, y, x + size(rng), y + size(rng)};
}

// Intersection area by direct overlap of the two intervals.
inline double OverlapArea(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double h = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  return w * h;
}

// Random GP points spread over `images` images, with reprs computed against
// the first box of each image.
inline std::vector<GpPoint> RandomPoints(std::mt19937_64& rng, int count,
                                         int images) {
  std::uniform_int_distribution<int> pick(0, images - 1);
  std::normal_distribution<double> score(0.0, 1.5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GpPoint> pts;
  for (int i = 0; i < count; ++i) {
    GpPoint p;
    p.box = RandomBox(rng);
    p.repr = {unit(rng), unit(rng)};
    p.score = score(rng);
    p.group = pick(rng);
    pts.push_back(p);
  }
  return pts;
}

inline double MinEigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Gaussian log density through LU: log det from the LU factors and the
// quadratic form through a full-pivot solve.
inline double DenseLogDensity(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& mean,
                              const Eigen::MatrixXd& cov) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(cov);
  const Eigen::VectorXd r = x - mean;
  const double quad = r.dot(lu.solve(r));
  double log_det = 0;
  const Eigen::MatrixXd u = lu.matrixLU().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < u.rows(); ++i) log_det += std::log(std::abs(u(i, i)));
  return -0.5 * quad - 0.5 * log_det -
         0.5 * static_cast<double>(x.size()) * std::log(2 * M_PI);
}

// Covariance written out entry by entry from the kernel definitions.
inline Eigen::MatrixXd DenseCovariance(std::span<const GpPoint> pts,
                                       const GpHyperParams& h) {
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const GpPoint& p = pts[static_cast<std::size_t>(i)];
      const GpPoint& q = pts[static_cast<std::size_t>(j)];
      const double d0 = p.repr.iou_to_max - q.repr.iou_to_max;
      const double d1 = p.repr.center_dist - q.repr.center_dist;
      double v = h.b * std::exp(-0.5 * (h.gamma[0] * d0 * d0 + h.gamma[1] * d1 * d1));
      if (p.group == q.group) {
        const double inter = OverlapArea(p.box, q.box);
        const double uni = (p.box.x2 - p.box.x1) * (p.box.y2 - p.box.y1) +
                           (q.box.x2 - q.box.x1) * (q.box.y2 - q.box.y1) - inter;
        v += h.a * 2 * inter / (inter + uni);
      }
      k(i, j) = v;
    }
  }
  k.diagonal().array() += h.jitter;
  return k;
}

inline double DenseMarginal(std::span<const GpPoint> pts,
                            const GpHyperParams& h) {
  Eigen::VectorXd f(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) f[static_cast<Eigen::Index>(i)] = pts[i].score;
  return DenseLogDensity(f, Eigen::VectorXd::Constant(f.size(), h.mu),
                         DenseCovariance(pts, h));
}

// Average precision by counting, for every positive, the items ranked at or
// above it (higher score, or equal score and earlier index). Terms are summed
// best rank first so the result is bitwise comparable.
inline double BruteForceAp(std::span<const int> labels,
                           std::span<const double> scores) {
  std::vector<std::pair<int, double>> terms;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) continue;
    int above = 0;
    int pos_above = 0;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      const bool ranks_before =
          scores[j] > scores[i] || (scores[j] == scores[i] && j <= i);
      if (ranks_before) {
        ++above;
        if (labels[j] == 1) ++pos_above;
      }
    }
    terms.emplace_back(above, static_cast<double>(pos_above) / above);
  }
  std::sort(terms.begin(), terms.end());
  double sum = 0;
  for (const auto& [rank, term] : terms) sum += term;
  return sum / static_cast<double>(terms.size());
}

// Fraction of (positive, negative) pairs ordered correctly, ties counting 1/2.
inline double PairwiseAuc(std::span<const int> labels,
                          std::span<const double> scores) {
  double wins = 0;
  double pairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] != -1) continue;
      pairs += 1;
      if (scores[i] > scores[j]) wins += 1;
      if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Central difference of f along coordinate k.
template <typename F, typename Vec>
double CentralDifference(F&& f, Vec x, int k, double h) {
  Vec xp = x;
  Vec xm = x;
  xp[k] += h;
  xm[k] -= h;
  return (f(xp) - f(xm)) / (2 * h);
}

}  // namespace irreg::testing

#endif  // IRREG_TESTS_ORACLES_HPP_
