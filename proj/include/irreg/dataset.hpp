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

#ifndef IRREG_DATASET_HPP_
#define IRREG_DATASET_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace irreg {

// Axis-aligned box in pixel coordinates. Valid boxes have strictly positive
// area and finite coordinates.
struct BoundingBox {
  double x1 = 0;
  double y1 = 0;
  double x2 = 0;
  double y2 = 0;

  bool IsValid() const;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Proposal {
  BoundingBox box;
  std::optional<std::vector<float>> feature;
  // Detection score w^T x + b; absent until a detector has been applied.
  std::optional<double> score;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

enum class Status { kRegular, kIrregular, kOther, kUnlabeled };
enum class Split { kTrain, kTest };

std::string_view StatusName(Status status);
Status ParseStatus(std::string_view name);
std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

struct ImageRecord {
  std::string id;
  std::string class_name;
  Status status = Status::kUnlabeled;
  Split split = Split::kTest;
  double width = 0;
  double height = 0;
  std::vector<Proposal> proposals;
  std::optional<std::vector<float>> global_feature;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct DatasetManifest {
  // Class shared by every record; empty when records span several classes.
  std::string class_name;
  // Feature dimensionality D; 0 when no record carries features.
  std::size_t feature_dim = 0;
  std::vector<ImageRecord> records;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) =
      default;
};

// Reads a JSON-lines dataset. Boxes are clamped to the image; proposals that
// end up degenerate are dropped and records left without proposals are
// rejected. Both produce warnings, which are appended to `warnings` when it is
// non-null and printed to stderr otherwise.
DatasetManifest LoadDataset(const std::filesystem::path& path,
                            std::vector<std::string>* warnings = nullptr);

// Writes one JSON object per record. LoadDataset(SaveDataset(m)) == m for
// manifests built from valid records.
void SaveDataset(const DatasetManifest& manifest,
                 const std::filesystem::path& path);

// Checks the manifest invariants (unique ids, feature dimensionality,
// training statuses, box validity). Throws DataError on the first violation.
void ValidateManifest(const DatasetManifest& manifest);

struct ScoreEntry {
  std::string id;
  double score = 0;

  friend bool operator==(const ScoreEntry&, const ScoreEntry&) = default;
};

// CSV with header `id,score` and scores printed with 9 significant digits.
void SaveScores(std::span<const ScoreEntry> entries,
                const std::filesystem::path& path);
std::vector<ScoreEntry> LoadScores(const std::filesystem::path& path);

}  // namespace irreg

#endif  // IRREG_DATASET_HPP_
