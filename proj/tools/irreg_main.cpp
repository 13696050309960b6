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

// Command-line front end: one subcommand per pipeline stage plus `run`.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "irreg/error.hpp"
#include "irreg/pipeline.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;
constexpr int kExitIo = 5;
constexpr int kExitOther = 1;

constexpr char kExitCodeHelp[] =
    "Exit codes: 0 success, 1 unexpected failure, 2 usage error, 3 invalid "
    "or inconsistent data, 4 numerical failure (covariance not positive "
    "definite), 5 file I/O error.";

int ExitCodeFor(irreg::ErrorKind kind) {
  switch (kind) {
    case irreg::ErrorKind::kData:
      return kExitData;
    case irreg::ErrorKind::kNumerical:
      return kExitNumerical;
    case irreg::ErrorKind::kIo:
      return kExitIo;
    case irreg::ErrorKind::kOther:
      return kExitOther;
  }
  return kExitOther;
}

void AddSynthOptions(CLI::App* cmd, irreg::SynthConfig* cfg) {
  cmd->add_option("--synth-seed", cfg->seed, "Generator seed");
  cmd->add_option("--images-per-status", cfg->images_per_status,
                  "Images per split/status cell");
  cmd->add_option("--proposals-per-image", cfg->proposals_per_image);
  cmd->add_option("--feature-dim", cfg->feature_dim);
  cmd->add_option("--score-noise", cfg->score_noise);
  cmd->add_option("--flip-fraction", cfg->irregular_flip_fraction,
                  "Fraction of object proposals negated in irregular images");
  cmd->add_option("--min-object-fraction", cfg->min_object_fraction,
                  "Lower bound of the per-image share of object proposals");
  cmd->add_option("--max-object-fraction", cfg->max_object_fraction);
  cmd->add_option("--min-jitter", cfg->min_jitter,
                  "Lower bound of the per-proposal jitter, relative to object size");
  cmd->add_option("--max-jitter", cfg->max_jitter);
  cmd->add_option("--width", cfg->width);
  cmd->add_option("--height", cfg->height);
  cmd->add_option("--class", cfg->class_name);
}

void AddTrainOptions(CLI::App* cmd, irreg::TrainConfig* cfg) {
  cmd->add_option("--learning-rate", cfg->learning_rate);
  cmd->add_option("--epochs", cfg->epochs);
  cmd->add_option("--batch-size", cfg->batch_size);
  cmd->add_option("--train-seed", cfg->seed, "Shuffling seed for SGD");
  cmd->add_option("--weight-decay", cfg->weight_decay);
}

std::vector<irreg::Method> ParseMethods(const std::vector<std::string>& names) {
  std::vector<irreg::Method> out;
  for (const auto& n : names) out.push_back(irreg::ParseMethod(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Irregular object identification from detection score "
               "distributions"};
  app.footer(kExitCodeHelp);
  app.set_config("--config", "",
                 "INI/TOML file with option values; command-line flags "
                 "override it. Subcommand options go in a [subcommand] "
                 "section.");
  app.require_subcommand(1);

  // synth
  irreg::SynthConfig synth_cfg;
  fs::path synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--out", synth_out, "Output JSON-lines file")->required();
  AddSynthOptions(synth, &synth_cfg);

  // detect-train
  irreg::TrainConfig train_cfg;
  fs::path train_dataset, train_out;
  auto* detect = app.add_subcommand("detect-train",
                                    "Train the max-pooling MIL detector");
  detect->add_option("--dataset", train_dataset)->required();
  detect->add_option("--out", train_out, "Detector JSON file")->required();
  AddTrainOptions(detect, &train_cfg);

  // score-proposals
  fs::path sp_dataset, sp_detector, sp_out;
  int sp_jobs = 1;
  auto* score_props = app.add_subcommand(
      "score-proposals", "Fill proposal scores with a trained detector");
  score_props->add_option("--dataset", sp_dataset)->required();
  score_props->add_option("--detector", sp_detector)->required();
  score_props->add_option("--out", sp_out)->required();
  score_props->add_option("--jobs", sp_jobs)->check(CLI::PositiveNumber);

  // gp-fit
  irreg::GpFitConfig gp_cfg;
  fs::path gp_dataset, gp_out_regular, gp_out_other;
  auto* gp_fit =
      app.add_subcommand("gp-fit", "Fit the regular and other-class GP models");
  gp_fit->add_option("--dataset", gp_dataset, "Scored dataset")->required();
  gp_fit->add_option("--out-regular", gp_out_regular)->required();
  gp_fit->add_option("--out-other", gp_out_other)->required();
  gp_fit->add_option("--top-n", gp_cfg.top_n, "Proposals kept per image")
      ->check(CLI::PositiveNumber);
  gp_fit->add_option("--max-train-images", gp_cfg.max_train_images,
                     "Training images retained per model")
      ->check(CLI::PositiveNumber);
  gp_fit->add_option("--seed", gp_cfg.seed);
  gp_fit->add_option("--max-iters", gp_cfg.max_iters);
  gp_fit->add_option("--jobs", gp_cfg.jobs)->check(CLI::PositiveNumber);

  // score
  irreg::ScoreConfig sc_cfg;
  std::string sc_method = "gp";
  fs::path sc_dataset, sc_out;
  auto* score = app.add_subcommand("score", "Score test images");
  score->add_option("--method", sc_method)
      ->check(CLI::IsMember(
          {"gp", "pnratio", "global", "milmax", "milmaxgauss", "miltopk"}));
  score->add_option("--dataset", sc_dataset, "Scored dataset")->required();
  score->add_option("--out", sc_out, "Score CSV")->required();
  score->add_option("--gp-regular", sc_cfg.gp_regular);
  score->add_option("--gp-other", sc_cfg.gp_other);
  score->add_option("--top-n", sc_cfg.top_n)->check(CLI::PositiveNumber);
  score->add_option("--top-k", sc_cfg.top_k)->check(CLI::PositiveNumber);
  score->add_option("--jobs", sc_cfg.jobs)->check(CLI::PositiveNumber);
  AddTrainOptions(score, &sc_cfg.global_train);

  // eval
  fs::path ev_dataset, ev_out_dir = ".";
  std::map<std::string, std::string> ev_scores;
  auto* eval = app.add_subcommand("eval", "Compute AP, mAP and ROC");
  eval->add_option("--dataset", ev_dataset)->required();
  eval->add_option("--scores", ev_scores, "method=path pairs")
      ->required()
      ->delimiter(',');
  eval->add_option("--out-dir", ev_out_dir);

  // run
  irreg::PipelineConfig run_cfg;
  std::vector<std::string> run_methods;
  auto* run = app.add_subcommand("run", "Run the whole pipeline");
  run->add_option("--dataset", run_cfg.dataset,
                  "Input dataset (synthesized when omitted)");
  run->add_option("--out-dir", run_cfg.output_dir);
  run->add_option("--methods", run_methods, "Subset of scoring methods")
      ->delimiter(',');
  run->add_flag("--planted-scores", run_cfg.planted_scores,
                "Use dataset scores instead of training a detector");
  run->add_option("--top-n", run_cfg.top_n)->check(CLI::PositiveNumber);
  run->add_option("--top-k", run_cfg.top_k)->check(CLI::PositiveNumber);
  run->add_option("--max-train-images", run_cfg.max_train_images)
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", run_cfg.seed);
  run->add_option("--gp-max-iters", run_cfg.gp_max_iters);
  run->add_option("--jobs", run_cfg.jobs)->check(CLI::PositiveNumber);
  AddTrainOptions(run, &run_cfg.train);
  AddSynthOptions(run, &run_cfg.synth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*synth) {
      irreg::RunSynthStage(synth_cfg, synth_out);
    } else if (*detect) {
      irreg::RunDetectTrainStage(train_dataset, train_cfg, train_out);
    } else if (*score_props) {
      irreg::RunScoreProposalsStage(sp_dataset, sp_detector, sp_out, sp_jobs);
    } else if (*gp_fit) {
      irreg::RunGpFitStage(gp_dataset, gp_cfg, gp_out_regular, gp_out_other);
    } else if (*score) {
      const irreg::Method method = irreg::ParseMethod(sc_method);
      if (method == irreg::Method::kGp &&
          (sc_cfg.gp_regular.empty() || sc_cfg.gp_other.empty())) {
        std::cerr << "--method gp needs --gp-regular and --gp-other\n";
        return kExitUsage;
      }
      irreg::RunScoreStage(method, sc_dataset, sc_cfg, sc_out);
    } else if (*eval) {
      std::map<std::string, fs::path> files(ev_scores.begin(), ev_scores.end());
      const auto reports = irreg::RunEvalStage(ev_dataset, files, ev_out_dir);
      std::cout << irreg::FormatReportTable(reports);
    } else if (*run) {
      if (!run_methods.empty()) run_cfg.methods = ParseMethods(run_methods);
      const auto reports = irreg::RunPipeline(run_cfg);
      std::cout << irreg::FormatReportTable(reports);
    }
  } catch (const irreg::StageError& e) {
    std::cerr << "error in stage " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const irreg::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return 0;
}
