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

#include "irreg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>
#include <unordered_map>

#include "irreg/baselines.hpp"
#include "irreg/gp_model.hpp"

namespace irreg {
namespace {

namespace fs = std::filesystem;

template <typename F>
auto InStage(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const DataError& e) {
    throw StageError(stage, e.what(), ErrorKind::kData);
  } catch (const NumericalError& e) {
    throw StageError(stage, e.what(), ErrorKind::kNumerical);
  } catch (const IoError& e) {
    throw StageError(stage, e.what(), ErrorKind::kIo);
  } catch (const fs::filesystem_error& e) {
    throw StageError(stage, e.what(), ErrorKind::kIo);
  } catch (const std::exception& e) {
    throw StageError(stage, e.what(), ErrorKind::kOther);
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kGp:
      return "gp";
    case Method::kPnRatio:
      return "pnratio";
    case Method::kGlobal:
      return "global";
    case Method::kMilMax:
      return "milmax";
    case Method::kMilMaxGauss:
      return "milmaxgauss";
    case Method::kMilTopK:
      return "miltopk";
  }
  return "gp";
}

Method ParseMethod(std::string_view name) {
  for (Method m : AllMethods()) {
    if (MethodName(m) == name) return m;
  }
  throw DataError("unknown method '" + std::string(name) + "'");
}

std::vector<Method> AllMethods() {
  return {Method::kGp,     Method::kPnRatio,     Method::kGlobal,
          Method::kMilMax, Method::kMilMaxGauss, Method::kMilTopK};
}

void ParallelFor(std::size_t n, int jobs,
                 const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

void WriteWithPartial(const fs::path& path,
                      const std::function<void(const fs::path&)>& write) {
  fs::path partial = path;
  partial += ".partial";
  write(partial);
  fs::rename(partial, path);
}

void RunSynthStage(const SynthConfig& cfg, const fs::path& out) {
  InStage("synth", [&] {
    const DatasetManifest m = GenerateSynthetic(cfg);
    WriteWithPartial(out, [&](const fs::path& p) { SaveDataset(m, p); });
  });
}

void RunDetectTrainStage(const fs::path& dataset, const TrainConfig& cfg,
                         const fs::path& out_detector) {
  InStage("detect-train", [&] {
    const Detector d = TrainDetector(LoadDataset(dataset), cfg);
    WriteWithPartial(out_detector,
                     [&](const fs::path& p) { SaveDetector(d, p); });
  });
}

void RunScoreProposalsStage(const fs::path& dataset, const fs::path& detector,
                            const fs::path& out_dataset, int jobs) {
  InStage("score-proposals", [&] {
    DatasetManifest m = LoadDataset(dataset);
    const Detector d = LoadDetector(detector);
    ParallelFor(m.records.size(), jobs, [&](std::size_t i) {
      m.records[i] = ScoreProposals(d, std::move(m.records[i]));
    });
    WriteWithPartial(out_dataset, [&](const fs::path& p) { SaveDataset(m, p); });
  });
}

void RunGpFitStage(const fs::path& scored_dataset, const GpFitConfig& cfg,
                   const fs::path& out_regular, const fs::path& out_other) {
  InStage("gp-fit", [&] {
    const DatasetManifest m = LoadDataset(scored_dataset);
    const Status statuses[] = {Status::kRegular, Status::kOther};
    const fs::path outputs[] = {out_regular, out_other};
    FitOptions options;
    options.max_iters = cfg.max_iters;
    ParallelFor(2, cfg.jobs, [&](std::size_t k) {
      const auto images = SelectTrainingImages(
          m, statuses[k], cfg.max_train_images, cfg.seed + k);
      if (images.empty()) {
        throw DataError(std::string("no ") +
                        std::string(StatusName(statuses[k])) +
                        " training images");
      }
      TrainingProposalSet set = BuildTrainingSet(images, cfg.top_n);
      const GpModel model =
          TrainGpModel(std::move(set),
                       InitialHyperParams(statuses[k], cfg.seed + 10 + k),
                       options);
      WriteWithPartial(outputs[k], [&](const fs::path& p) { model.Save(p); });
    });
  });
}

std::vector<ScoreEntry> ScoreTestImages(Method method,
                                        const DatasetManifest& scored,
                                        const ScoreConfig& cfg) {
  std::vector<const ImageRecord*> tests;
  for (const auto& r : scored.records) {
    if (r.split == Split::kTest) tests.push_back(&r);
  }
  std::vector<ScoreEntry> out(tests.size());

  std::function<double(const ImageRecord&)> score;
  std::optional<GpModel> regular, other;
  std::optional<BaselineDensities> densities;
  std::optional<Detector> global;
  switch (method) {
    case Method::kGp:
      regular = GpModel::Load(cfg.gp_regular);
      other = GpModel::Load(cfg.gp_other);
      score = [&](const ImageRecord& r) {
        return IrregularityScore(*regular, *other, r, cfg.top_n);
      };
      break;
    case Method::kPnRatio:
      densities = FitBaselineDensities(scored, cfg.top_n);
      score = [&](const ImageRecord& r) {
        return PnRatioScore(densities->ratio_regular, densities->ratio_other,
                            r, cfg.top_n);
      };
      break;
    case Method::kGlobal:
      global = TrainGlobalClassifier(scored, cfg.global_train);
      score = [&](const ImageRecord& r) { return GlobalLinearScore(*global, r); };
      break;
    case Method::kMilMax:
      score = [](const ImageRecord& r) { return MilMaxScore(r); };
      break;
    case Method::kMilMaxGauss:
      densities = FitBaselineDensities(scored, cfg.top_n);
      score = [&](const ImageRecord& r) {
        return MilMaxGaussianScore(densities->max_regular,
                                   densities->max_other, r);
      };
      break;
    case Method::kMilTopK:
      score = [&](const ImageRecord& r) { return MilTopKScore(r, cfg.top_k); };
      break;
  }
  ParallelFor(tests.size(), cfg.jobs, [&](std::size_t i) {
    out[i] = {tests[i]->id, score(*tests[i])};
  });
  return out;
}

void RunScoreStage(Method method, const fs::path& scored_dataset,
                   const ScoreConfig& cfg, const fs::path& out_csv) {
  InStage("score", [&] {
    const auto entries =
        ScoreTestImages(method, LoadDataset(scored_dataset), cfg);
    WriteWithPartial(out_csv,
                     [&](const fs::path& p) { SaveScores(entries, p); });
  });
}

std::map<std::string, EvalReport> RunEvalStage(
    const fs::path& dataset,
    const std::map<std::string, fs::path>& score_files, const fs::path& out_dir) {
  return InStage("eval", [&] {
    const DatasetManifest m = LoadDataset(dataset);
    if (!out_dir.empty()) fs::create_directories(out_dir);
    std::map<std::string, EvalReport> reports;
    for (const auto& [name, path] : score_files) {
      std::unordered_map<std::string, double> scores;
      for (const auto& e : LoadScores(path)) scores[e.id] = e.score;
      reports[name] = Evaluate(m, scores);
      WriteWithPartial(out_dir / ("roc_" + name + ".csv"),
                       [&](const fs::path& p) { WriteRocCsv(reports[name], p); });
    }
    WriteWithPartial(out_dir / "report.json", [&](const fs::path& p) {
      WriteText(p, ReportsToJson(reports).dump(2) + "\n");
    });
    WriteWithPartial(out_dir / "report.txt", [&](const fs::path& p) {
      WriteText(p, FormatReportTable(reports));
    });
    return reports;
  });
}

std::map<std::string, EvalReport> RunPipeline(const PipelineConfig& cfg) {
  const fs::path& dir = cfg.output_dir;
  InStage("setup", [&] {
    fs::create_directories(dir);
    if (!cfg.dataset.empty() && !fs::exists(cfg.dataset)) {
      throw IoError("dataset not found: " + cfg.dataset.string());
    }
    if (cfg.methods.empty()) throw DataError("no scoring method selected");
  });

  fs::path dataset = cfg.dataset;
  if (dataset.empty()) {
    dataset = dir / "dataset.jsonl";
    RunSynthStage(cfg.synth, dataset);
  }

  fs::path scored = dataset;
  if (!cfg.planted_scores) {
    RunDetectTrainStage(dataset, cfg.train, dir / "detector.json");
    scored = dir / "scored.jsonl";
    RunScoreProposalsStage(dataset, dir / "detector.json", scored, cfg.jobs);
  }

  ScoreConfig score_cfg;
  score_cfg.top_n = cfg.top_n;
  score_cfg.top_k = cfg.top_k;
  score_cfg.global_train = cfg.train;
  score_cfg.jobs = cfg.jobs;
  const bool wants_gp = std::find(cfg.methods.begin(), cfg.methods.end(),
                                  Method::kGp) != cfg.methods.end();
  if (wants_gp) {
    GpFitConfig gp;
    gp.top_n = cfg.top_n;
    gp.max_train_images = cfg.max_train_images;
    gp.seed = cfg.seed;
    gp.max_iters = cfg.gp_max_iters;
    gp.jobs = cfg.jobs;
    score_cfg.gp_regular = dir / "gp_regular.model";
    score_cfg.gp_other = dir / "gp_other.model";
    RunGpFitStage(scored, gp, score_cfg.gp_regular, score_cfg.gp_other);
  }

  std::map<std::string, fs::path> score_files;
  for (Method m : cfg.methods) {
    const std::string name(MethodName(m));
    const fs::path out = dir / ("scores_" + name + ".csv");
    RunScoreStage(m, scored, score_cfg, out);
    score_files[name] = out;
  }
  return RunEvalStage(dataset, score_files, dir);
}

}  // namespace irreg
