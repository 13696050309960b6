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

#ifndef IRREG_PIPELINE_HPP_
#define IRREG_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "irreg/dataset.hpp"
#include "irreg/error.hpp"
#include "irreg/evaluation.hpp"
#include "irreg/mil_detector.hpp"
#include "irreg/synthetic.hpp"

namespace irreg {

enum class Method { kGp, kPnRatio, kGlobal, kMilMax, kMilMaxGauss, kMilTopK };

std::string_view MethodName(Method method);
Method ParseMethod(std::string_view name);
std::vector<Method> AllMethods();

enum class ErrorKind { kData, kNumerical, kIo, kOther };

// Wraps the failure of one pipeline stage, keeping the kind of the cause.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& cause, ErrorKind kind)
      : Error(stage + ": " + cause), stage_(std::move(stage)), kind_(kind) {}
  const std::string& stage() const { return stage_; }
  ErrorKind kind() const { return kind_; }

 private:
  std::string stage_;
  ErrorKind kind_;
};

struct GpFitConfig {
  std::size_t top_n = 20;
  std::size_t max_train_images = 100;
  std::uint64_t seed = 2016;
  int max_iters = 100;
  int jobs = 1;
};

struct ScoreConfig {
  std::size_t top_n = 20;
  // k of the top-k baseline.
  std::size_t top_k = 20;
  // Models for Method::kGp.
  std::filesystem::path gp_regular;
  std::filesystem::path gp_other;
  // Optimizer settings of the global classifier.
  TrainConfig global_train;
  int jobs = 1;
};

// Runs fn(0..n-1) on up to `jobs` threads. Each index is handled exactly once,
// so results written by index do not depend on the job count.
void ParallelFor(std::size_t n, int jobs,
                 const std::function<void(std::size_t)>& fn);

// Writes through `path`.partial and renames on success; a failed write leaves
// the .partial file behind.
void WriteWithPartial(const std::filesystem::path& path,
                      const std::function<void(const std::filesystem::path&)>&
                          write);

// Individual stages. Each reads and writes files only.
void RunSynthStage(const SynthConfig& cfg, const std::filesystem::path& out);
void RunDetectTrainStage(const std::filesystem::path& dataset,
                         const TrainConfig& cfg,
                         const std::filesystem::path& out_detector);
void RunScoreProposalsStage(const std::filesystem::path& dataset,
                            const std::filesystem::path& detector,
                            const std::filesystem::path& out_dataset,
                            int jobs = 1);
void RunGpFitStage(const std::filesystem::path& scored_dataset,
                   const GpFitConfig& cfg,
                   const std::filesystem::path& out_regular,
                   const std::filesystem::path& out_other);

// Scores every test image of an already scored dataset.
std::vector<ScoreEntry> ScoreTestImages(Method method,
                                        const DatasetManifest& scored,
                                        const ScoreConfig& cfg);
void RunScoreStage(Method method, const std::filesystem::path& scored_dataset,
                   const ScoreConfig& cfg, const std::filesystem::path& out_csv);

// Evaluates score CSVs (method name -> path) and writes report.json,
// report.txt and roc_<method>.csv into out_dir.
std::map<std::string, EvalReport> RunEvalStage(
    const std::filesystem::path& dataset,
    const std::map<std::string, std::filesystem::path>& score_files,
    const std::filesystem::path& out_dir);

struct PipelineConfig {
  // Input dataset; when empty a synthetic one is generated from `synth`.
  std::filesystem::path dataset;
  std::filesystem::path output_dir = "irreg_out";
  std::vector<Method> methods = AllMethods();
  // Use the scores already stored in the dataset instead of training a
  // detector.
  bool planted_scores = false;
  std::size_t top_n = 20;
  std::size_t top_k = 20;
  std::size_t max_train_images = 100;
  std::uint64_t seed = 2016;
  int gp_max_iters = 100;
  int jobs = 1;
  TrainConfig train;
  SynthConfig synth;
};

// synth -> detect-train -> score-proposals -> gp-fit -> score -> eval. All
// artifacts land in output_dir; failures surface as StageError.
std::map<std::string, EvalReport> RunPipeline(const PipelineConfig& cfg);

}  // namespace irreg

#endif  // IRREG_PIPELINE_HPP_
