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

#ifndef IRREG_EVALUATION_HPP_
#define IRREG_EVALUATION_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "irreg/dataset.hpp"
#include "json.hpp"

namespace irreg {

// Labels are +1 (irregular) / -1 (regular or other class); higher scores rank
// first and ties keep input order.

// Mean over positives of the precision at each positive's rank.
double AveragePrecision(std::span<const int> labels,
                        std::span<const double> scores);

struct RocPoint {
  double fpr = 0;
  double tpr = 0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocResult {
  // Probability that a random positive outscores a random negative, ties
  // counting one half.
  double auc = 0;
  // From (0, 0) to (1, 1), one point per distinct score.
  std::vector<RocPoint> points;
};

RocResult RocAuc(std::span<const int> labels, std::span<const double> scores);

struct ClassMetrics {
  double ap = 0;
  double auc = 0;
  std::size_t num_positive = 0;
  std::size_t num_negative = 0;
  std::vector<RocPoint> roc;
};

struct EvalReport {
  std::map<std::string, ClassMetrics> per_class;
  double map = 0;
};

// Scores the test split of each listed class (all classes when empty).
// Throws DataError if a test image has no score.
EvalReport Evaluate(const DatasetManifest& manifest,
                    const std::unordered_map<std::string, double>& scores,
                    std::span<const std::string> classes = {});

nlohmann::ordered_json ReportToJson(const EvalReport& report);

// {"methods": {name: report, ...}}
nlohmann::ordered_json ReportsToJson(
    const std::map<std::string, EvalReport>& reports);

// Methods as rows, classes then mAP as columns, AP in percent.
std::string FormatReportTable(const std::map<std::string, EvalReport>& reports);

// CSV with header `class,fpr,tpr`.
void WriteRocCsv(const EvalReport& report, const std::filesystem::path& path);

}  // namespace irreg

#endif  // IRREG_EVALUATION_HPP_
