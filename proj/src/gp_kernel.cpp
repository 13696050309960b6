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

#include "irreg/gp_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>

#include "irreg/error.hpp"
#include "irreg/mil_detector.hpp"

namespace irreg {

double KInter(const ProposalRepr& r1, const ProposalRepr& r2,
              const std::array<double, 2>& gamma) {
  const double d0 = r1.iou_to_max - r2.iou_to_max;
  const double d1 = r1.center_dist - r2.center_dist;
  return std::exp(-0.5 * (gamma[0] * d0 * d0 + gamma[1] * d1 * d1));
}

double KFull(const GpPoint& p, const GpPoint& q, const GpHyperParams& hyper) {
  double k = hyper.b * KInter(p.repr, q.repr, hyper.gamma);
  if (p.group == q.group) k += hyper.a * Chi2Overlap(p.box, q.box);
  return k;
}

Eigen::MatrixXd AssembleGram(std::span<const GpPoint> points,
                             const GpHyperParams& hyper, bool with_jitter) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double k = KFull(points[i], points[j], hyper);
      gram(i, j) = k;
      gram(j, i) = k;
    }
  }
  if (with_jitter) gram.diagonal().array() += hyper.jitter;
  return gram;
}

FactoredGram FactorGram(const Eigen::MatrixXd& gram, double initial_jitter) {
  const auto n = gram.rows();
  if (n == 0) throw NumericalError("cannot factor an empty covariance");
  const double mean_diag = gram.diagonal().mean();
  Eigen::MatrixXd work(n, n);
  auto attempt = [&](double jitter, FactoredGram* out) {
    work = gram;
    work.diagonal().array() += jitter;
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(work);
    if (llt.info() != Eigen::Success) return false;
    out->lower = work.triangularView<Eigen::Lower>();
    out->jitter = jitter;
    return true;
  };

  FactoredGram out;
  if (attempt(initial_jitter, &out)) return out;
  double last = initial_jitter;
  const double ceiling = 1e-2 * std::abs(mean_diag);
  // A zero start would never grow; such a matrix is not a covariance anyway.
  for (double jitter = std::max(10 * initial_jitter, 1e-6 * std::abs(mean_diag));
       jitter > 0 && jitter <= ceiling * (1 + 1e-9); jitter *= 10) {
    last = jitter;
    if (attempt(jitter, &out)) return out;
  }
  std::ostringstream msg;
  msg << "covariance of size " << n
      << " is not positive definite; last jitter tried " << last;
  throw NumericalError(msg.str());
}

double DefaultJitter(const GpHyperParams& hyper) {
  return 1e-6 * (hyper.a + hyper.b);
}

std::vector<GpPoint> ImageRegions(const ImageRecord& image, std::size_t top_n,
                                  std::int64_t group) {
  const std::vector<Proposal> top = TopNProposals(image, top_n);
  if (top.empty()) {
    throw DataError("record " + image.id + ": no scored proposals");
  }
  const BoundingBox& max_box = top.front().box;
  std::vector<GpPoint> points;
  points.reserve(top.size());
  for (const auto& p : top) {
    points.push_back(
        {MakeProposalRepr(p.box, max_box, image.width, image.height), p.box,
         *p.score, group});
  }
  return points;
}

std::vector<const ImageRecord*> SelectTrainingImages(
    const DatasetManifest& manifest, Status status, std::size_t max_images,
    std::uint64_t seed) {
  std::vector<const ImageRecord*> pool;
  for (const auto& r : manifest.records) {
    if (r.split == Split::kTrain && r.status == status) pool.push_back(&r);
  }
  if (pool.size() <= max_images) return pool;

  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < max_images; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(max_images);
  std::sort(idx.begin(), idx.end());
  std::vector<const ImageRecord*> chosen;
  chosen.reserve(max_images);
  for (std::size_t i : idx) chosen.push_back(pool[i]);
  return chosen;
}

TrainingProposalSet BuildTrainingSet(
    std::span<const ImageRecord* const> images, std::size_t top_n) {
  TrainingProposalSet set;
  for (const ImageRecord* image : images) {
    const auto group = static_cast<std::int64_t>(set.image_ids.size());
    auto regions = ImageRegions(*image, top_n, group);
    set.image_ids.push_back(image->id);
    set.points.insert(set.points.end(), regions.begin(), regions.end());
  }
  return set;
}

}  // namespace irreg
