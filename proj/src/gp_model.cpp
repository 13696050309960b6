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

#include "irreg/gp_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "irreg/bfgs.hpp"
#include "irreg/error.hpp"

namespace irreg {
namespace {

static_assert(std::endian::native == std::endian::little,
              "model files are written in host byte order");

constexpr char kModelMagic[] = "IRREG-GP-MODEL 1\n";
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

Eigen::VectorXd Scores(std::span<const GpPoint> points) {
  Eigen::VectorXd f(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    f[static_cast<Eigen::Index>(i)] = points[i].score;
  }
  return f;
}

double HalfLogDet(const Eigen::MatrixXd& lower) {
  return lower.diagonal().array().log().sum();
}

// Gaussian log density of residual r under covariance L L^T.
double GaussianLogDensity(const Eigen::MatrixXd& lower,
                          const Eigen::VectorXd& r) {
  const Eigen::VectorXd z = lower.triangularView<Eigen::Lower>().solve(r);
  return -0.5 * z.squaredNorm() - HalfLogDet(lower) -
         0.5 * static_cast<double>(r.size()) * kLog2Pi;
}

template <typename T>
void WritePod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T ReadPod(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw DataError("truncated model file");
  return value;
}

}  // namespace

HyperVector ToHyperVector(const GpHyperParams& hyper) {
  HyperVector v;
  v << hyper.mu, std::log(hyper.gamma[0]), std::log(hyper.gamma[1]),
      std::log(hyper.a), std::log(hyper.b);
  return v;
}

GpHyperParams FromHyperVector(const HyperVector& v, double jitter) {
  GpHyperParams h;
  h.mu = v[0];
  h.gamma = {std::exp(v[1]), std::exp(v[2])};
  h.a = std::exp(v[3]);
  h.b = std::exp(v[4]);
  h.jitter = jitter;
  return h;
}

LogLikelihood LogMarginalLikelihood(std::span<const GpPoint> points,
                                    const GpHyperParams& hyper,
                                    bool with_gradient) {
  if (points.empty()) throw DataError("empty training proposal set");
  const FactoredGram fac =
      FactorGram(AssembleGram(points, hyper, false), hyper.jitter);
  const auto n = static_cast<Eigen::Index>(points.size());
  const Eigen::VectorXd r = Scores(points).array() - hyper.mu;
  const auto lower = fac.lower.triangularView<Eigen::Lower>();
  Eigen::VectorXd alpha = lower.solve(r);
  const double quad = alpha.squaredNorm();
  lower.transpose().solveInPlace(alpha);

  LogLikelihood out;
  out.value = -0.5 * quad - HalfLogDet(fac.lower) -
              0.5 * static_cast<double>(n) * kLog2Pi;
  if (!with_gradient) return out;

  // W = alpha alpha^T - K^-1, with K^-1 = L^-T L^-1.
  Eigen::MatrixXd linv = Eigen::MatrixXd::Identity(n, n);
  lower.solveInPlace(linv);
  Eigen::MatrixXd w(n, n);
  w.triangularView<Eigen::Lower>() = linv.transpose() * linv;
  w.triangularView<Eigen::Lower>() -= alpha * alpha.transpose();

  double g_a = 0;
  double g_b = 0;
  double g_gamma0 = 0;
  double g_gamma1 = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const GpPoint& q = points[static_cast<std::size_t>(j)];
    for (Eigen::Index i = j; i < n; ++i) {
      const GpPoint& p = points[static_cast<std::size_t>(i)];
      // Off-diagonal entries appear twice in the symmetric trace.
      const double weight = (i == j ? -0.5 : -1.0) * w(i, j);
      const double d0 = p.repr.iou_to_max - q.repr.iou_to_max;
      const double d1 = p.repr.center_dist - q.repr.center_dist;
      const double kint =
          hyper.b * std::exp(-0.5 * (hyper.gamma[0] * d0 * d0 +
                                     hyper.gamma[1] * d1 * d1));
      g_b += weight * kint;
      g_gamma0 += weight * kint * (-0.5 * hyper.gamma[0] * d0 * d0);
      g_gamma1 += weight * kint * (-0.5 * hyper.gamma[1] * d1 * d1);
      if (p.group == q.group) g_a += weight * hyper.a * Chi2Overlap(p.box, q.box);
    }
  }
  out.grad << alpha.sum(), g_gamma0, g_gamma1, g_a, g_b;
  return out;
}

FitResult FitHyperparameters(std::span<const GpPoint> points,
                             const GpHyperParams& init,
                             const FitOptions& options) {
  if (points.empty()) throw DataError("empty training proposal set");
  const double jitter = init.jitter;
  Objective nll = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const LogLikelihood ll =
        LogMarginalLikelihood(points, FromHyperVector(x, jitter), true);
    *grad = -ll.grad;
    return -ll.value;
  };
  BfgsOptions bfgs;
  bfgs.max_iters = options.max_iters;
  bfgs.grad_tol = options.grad_tol;
  const BfgsResult res = MinimizeBfgs(nll, ToHyperVector(init), bfgs);

  FitResult out;
  out.iterations = res.iterations;
  out.final_nll = res.f;
  out.hyper = res.iterations == 0 ? init : FromHyperVector(res.x, jitter);
  out.initial_nll = -LogMarginalLikelihood(points, init, false).value;
  return out;
}

GpHyperParams InitialHyperParams(Status model_status, std::uint64_t seed) {
  GpHyperParams h;
  h.mu = model_status == Status::kOther ? -3.0 : 3.0;
  h.a = 0.5;
  h.b = 0.5;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  h.gamma[0] = unif(rng);
  h.gamma[1] = unif(rng);
  h.jitter = DefaultJitter(h);
  return h;
}

GpModel GpModel::Build(TrainingProposalSet train, const GpHyperParams& hyper) {
  if (train.points.empty()) throw DataError("empty training proposal set");
  GpModel model;
  FactoredGram fac =
      FactorGram(AssembleGram(train.points, hyper, false), hyper.jitter);
  model.hyper_ = hyper;
  model.hyper_.jitter = fac.jitter;
  model.chol_ = std::move(fac.lower);
  const Eigen::VectorXd r = Scores(train.points).array() - hyper.mu;
  model.alpha_ = model.chol_.triangularView<Eigen::Lower>().solve(r);
  model.chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(
      model.alpha_);
  model.train_ = std::move(train);
  return model;
}

GpModel TrainGpModel(TrainingProposalSet train, const GpHyperParams& init,
                     const FitOptions& options, FitResult* fit) {
  const FitResult result = FitHyperparameters(train.points, init, options);
  if (fit != nullptr) *fit = result;
  return GpModel::Build(std::move(train), result.hyper);
}

void GpModel::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model " + path.string());
  out.write(kModelMagic, sizeof(kModelMagic) - 1);
  WritePod(out, hyper_.mu);
  WritePod(out, hyper_.gamma[0]);
  WritePod(out, hyper_.gamma[1]);
  WritePod(out, hyper_.a);
  WritePod(out, hyper_.b);
  WritePod(out, hyper_.jitter);
  WritePod(out, static_cast<std::uint64_t>(train_.image_ids.size()));
  for (const auto& id : train_.image_ids) {
    WritePod(out, static_cast<std::uint64_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
  }
  WritePod(out, static_cast<std::uint64_t>(train_.points.size()));
  for (const auto& p : train_.points) {
    WritePod(out, p.group);
    WritePod(out, p.repr.iou_to_max);
    WritePod(out, p.repr.center_dist);
    WritePod(out, p.box.x1);
    WritePod(out, p.box.y1);
    WritePod(out, p.box.x2);
    WritePod(out, p.box.y2);
    WritePod(out, p.score);
  }
  const Eigen::Index n = chol_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) WritePod(out, chol_(i, j));
  }
  for (Eigen::Index i = 0; i < n; ++i) WritePod(out, alpha_[i]);
  if (!out) throw IoError("write failed for " + path.string());
}

GpModel GpModel::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path.string());
  std::string magic(sizeof(kModelMagic) - 1, '\0');
  in.read(magic.data(), static_cast<std::streamsize>(magic.size()));
  if (!in || magic != kModelMagic) {
    throw DataError(path.string() + ": not a version-1 GP model file");
  }
  GpModel model;
  GpHyperParams& h = model.hyper_;
  h.mu = ReadPod<double>(in);
  h.gamma[0] = ReadPod<double>(in);
  h.gamma[1] = ReadPod<double>(in);
  h.a = ReadPod<double>(in);
  h.b = ReadPod<double>(in);
  h.jitter = ReadPod<double>(in);

  constexpr std::uint64_t kSanityLimit = std::uint64_t{1} << 32;
  const auto n_ids = ReadPod<std::uint64_t>(in);
  if (n_ids > kSanityLimit) throw DataError("corrupt model file");
  model.train_.image_ids.resize(n_ids);
  for (auto& id : model.train_.image_ids) {
    const auto len = ReadPod<std::uint64_t>(in);
    if (len > kSanityLimit) throw DataError("corrupt model file");
    id.resize(len);
    in.read(id.data(), static_cast<std::streamsize>(len));
  }
  const auto n_points = ReadPod<std::uint64_t>(in);
  if (n_points > kSanityLimit) throw DataError("corrupt model file");
  model.train_.points.resize(n_points);
  for (auto& p : model.train_.points) {
    p.group = ReadPod<std::int64_t>(in);
    p.repr.iou_to_max = ReadPod<double>(in);
    p.repr.center_dist = ReadPod<double>(in);
    p.box.x1 = ReadPod<double>(in);
    p.box.y1 = ReadPod<double>(in);
    p.box.x2 = ReadPod<double>(in);
    p.box.y2 = ReadPod<double>(in);
    p.score = ReadPod<double>(in);
    if (p.group < 0 || static_cast<std::uint64_t>(p.group) >= n_ids) {
      throw DataError("corrupt model file: bad image index");
    }
  }
  const auto n = static_cast<Eigen::Index>(n_points);
  model.chol_ = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) model.chol_(i, j) = ReadPod<double>(in);
  }
  model.alpha_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) model.alpha_[i] = ReadPod<double>(in);
  return model;
}

double ConditionalLogLikelihood(const GpModel& model,
                                std::span<const GpPoint> test,
                                bool per_proposal) {
  if (test.empty()) throw DataError("empty test proposal set");
  const GpHyperParams& h = model.hyper();
  const auto& train = model.train().points;
  const auto n = static_cast<Eigen::Index>(train.size());
  const auto m = static_cast<Eigen::Index>(test.size());

  // Training and test proposals never share an image: inter-image term only.
  Eigen::MatrixXd cross(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      cross(i, j) = h.b * KInter(train[static_cast<std::size_t>(i)].repr,
                                 test[static_cast<std::size_t>(j)].repr,
                                 h.gamma);
    }
  }
  Eigen::MatrixXd test_cov(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = j; i < m; ++i) {
      const GpPoint& p = test[static_cast<std::size_t>(i)];
      const GpPoint& q = test[static_cast<std::size_t>(j)];
      const double k =
          h.a * Chi2Overlap(p.box, q.box) + h.b * KInter(p.repr, q.repr, h.gamma);
      test_cov(i, j) = k;
      test_cov(j, i) = k;
    }
  }
  const Eigen::VectorXd mean =
      (cross.transpose() * model.alpha()).array() + h.mu;
  const Eigen::MatrixXd v =
      model.chol().triangularView<Eigen::Lower>().solve(cross);
  test_cov.noalias() -= v.transpose() * v;
  const FactoredGram fac = FactorGram(test_cov, model.jitter());
  const Eigen::VectorXd r = Scores(test) - mean;
  const double ll = GaussianLogDensity(fac.lower, r);
  return per_proposal ? ll / static_cast<double>(m) : ll;
}

ImageFit FitImage(const GpModel& regular, const GpModel& other,
                  const ImageRecord& image, std::size_t top_n) {
  const std::vector<GpPoint> regions = ImageRegions(image, top_n);
  return {ConditionalLogLikelihood(regular, regions),
          ConditionalLogLikelihood(other, regions)};
}

double IrregularityScore(const GpModel& regular, const GpModel& other,
                         const ImageRecord& image, std::size_t top_n) {
  const ImageFit fit = FitImage(regular, other, image, top_n);
  return -std::max(fit.ll_regular, fit.ll_other);
}

}  // namespace irreg
