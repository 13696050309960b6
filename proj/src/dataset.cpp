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

#include "irreg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <unordered_set>

#include "irreg/error.hpp"
#include "json.hpp"

namespace irreg {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string LinePrefix(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

std::optional<std::vector<float>> ParseFeature(const json& value,
                                               std::string_view what) {
  if (value.is_null()) return std::nullopt;
  if (!value.is_array()) {
    throw DataError(std::string(what) + " must be an array or null");
  }
  std::vector<float> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (!v.is_number()) {
      throw DataError(std::string(what) + " contains a non-numeric entry");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      throw DataError(std::string(what) + " contains a non-finite entry");
    }
    out.push_back(static_cast<float>(d));
  }
  return out;
}

double RequirePositive(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw DataError(std::string("missing numeric field '") + key + "'");
  }
  const double v = obj[key].get<double>();
  if (!std::isfinite(v) || v <= 0) {
    throw DataError(std::string("field '") + key + "' must be positive");
  }
  return v;
}

std::string RequireString(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw DataError(std::string("missing string field '") + key + "'");
  }
  return obj[key].get<std::string>();
}

BoundingBox ClampToImage(BoundingBox box, double width, double height) {
  box.x1 = std::clamp(box.x1, 0.0, width);
  box.x2 = std::clamp(box.x2, 0.0, width);
  box.y1 = std::clamp(box.y1, 0.0, height);
  box.y2 = std::clamp(box.y2, 0.0, height);
  return box;
}

// Parses one record. Returns the number of proposals dropped as degenerate.
std::size_t ParseRecord(const json& obj, ImageRecord* record) {
  if (!obj.is_object()) throw DataError("record must be a JSON object");
  record->id = RequireString(obj, "id");
  record->class_name = RequireString(obj, "class");
  record->status = ParseStatus(RequireString(obj, "status"));
  record->split = obj.contains("split") && !obj["split"].is_null()
                      ? ParseSplit(RequireString(obj, "split"))
                      : Split::kTest;
  record->width = RequirePositive(obj, "width");
  record->height = RequirePositive(obj, "height");
  record->global_feature =
      obj.contains("global_feature")
          ? ParseFeature(obj["global_feature"], "global_feature")
          : std::nullopt;

  if (!obj.contains("proposals") || !obj["proposals"].is_array()) {
    throw DataError("missing array field 'proposals'");
  }
  std::size_t dropped = 0;
  for (const auto& p : obj["proposals"]) {
    if (!p.is_object() || !p.contains("box") || !p["box"].is_array() ||
        p["box"].size() != 4) {
      throw DataError("proposal needs a 4-element 'box'");
    }
    Proposal proposal;
    const auto& b = p["box"];
    for (const auto& c : b) {
      if (!c.is_number()) throw DataError("box coordinates must be numeric");
    }
    proposal.box = {b[0].get<double>(), b[1].get<double>(),
                    b[2].get<double>(), b[3].get<double>()};
    proposal.feature = p.contains("feature")
                           ? ParseFeature(p["feature"], "proposal feature")
                           : std::nullopt;
    if (p.contains("score") && !p["score"].is_null()) {
      if (!p["score"].is_number()) throw DataError("score must be numeric");
      const double s = p["score"].get<double>();
      if (!std::isfinite(s)) throw DataError("score must be finite");
      proposal.score = s;
    }
    const BoundingBox raw = proposal.box;
    const bool finite = std::isfinite(raw.x1) && std::isfinite(raw.y1) &&
                        std::isfinite(raw.x2) && std::isfinite(raw.y2);
    if (finite) {
      proposal.box = ClampToImage(raw, record->width, record->height);
    }
    if (!finite || !proposal.box.IsValid()) {
      ++dropped;
      continue;
    }
    record->proposals.push_back(std::move(proposal));
  }
  return dropped;
}

ordered_json FeatureToJson(const std::optional<std::vector<float>>& f) {
  if (!f) return nullptr;
  return ordered_json(*f);
}

ordered_json RecordToJson(const ImageRecord& record) {
  ordered_json obj;
  obj["id"] = record.id;
  obj["class"] = record.class_name;
  obj["status"] = StatusName(record.status);
  obj["split"] = SplitName(record.split);
  obj["width"] = record.width;
  obj["height"] = record.height;
  obj["global_feature"] = FeatureToJson(record.global_feature);
  ordered_json proposals = ordered_json::array();
  for (const auto& p : record.proposals) {
    ordered_json jp;
    jp["box"] = {p.box.x1, p.box.y1, p.box.x2, p.box.y2};
    jp["feature"] = FeatureToJson(p.feature);
    jp["score"] = p.score ? ordered_json(*p.score) : ordered_json(nullptr);
    proposals.push_back(std::move(jp));
  }
  obj["proposals"] = std::move(proposals);
  return obj;
}

void CheckDim(const std::optional<std::vector<float>>& f, std::size_t* dim,
              const std::string& id) {
  if (!f) return;
  if (*dim == 0) {
    if (f->empty()) throw DataError("record " + id + ": empty feature vector");
    *dim = f->size();
  } else if (f->size() != *dim) {
    throw DataError("record " + id + ": feature length " +
                    std::to_string(f->size()) + " does not match D=" +
                    std::to_string(*dim));
  }
}

void CheckTrainStatus(const ImageRecord& record) {
  if (record.split == Split::kTrain && record.status != Status::kRegular &&
      record.status != Status::kOther) {
    throw DataError("record " + record.id + ": status '" +
                    std::string(StatusName(record.status)) +
                    "' is not allowed in the train split (only regular and "
                    "other images may be used for training)");
  }
}

std::string CommonClass(const std::vector<ImageRecord>& records) {
  if (records.empty()) return {};
  const std::string& first = records.front().class_name;
  for (const auto& r : records) {
    if (r.class_name != first) return {};
  }
  return first;
}

std::string FormatScore(double score) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", score);
  return buf;
}

}  // namespace

bool BoundingBox::IsValid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && x2 > x1 && y2 > y1;
}

std::string_view StatusName(Status status) {
  switch (status) {
    case Status::kRegular:
      return "regular";
    case Status::kIrregular:
      return "irregular";
    case Status::kOther:
      return "other";
    case Status::kUnlabeled:
      return "unlabeled";
  }
  return "unlabeled";
}

Status ParseStatus(std::string_view name) {
  if (name == "regular") return Status::kRegular;
  if (name == "irregular") return Status::kIrregular;
  if (name == "other") return Status::kOther;
  if (name == "unlabeled") return Status::kUnlabeled;
  throw DataError("unknown status '" + std::string(name) + "'");
}

std::string_view SplitName(Split split) {
  return split == Split::kTrain ? "train" : "test";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  throw DataError("unknown split '" + std::string(name) + "'");
}

DatasetManifest LoadDataset(const std::filesystem::path& path,
                            std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());

  std::vector<std::string> local_warnings;
  DatasetManifest manifest;
  std::unordered_set<std::string> ids;
  std::vector<std::string> rejected;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ImageRecord record;
    std::size_t dropped = 0;
    try {
      dropped = ParseRecord(json::parse(line), &record);
    } catch (const json::exception& e) {
      throw DataError(LinePrefix(line_no) + e.what());
    } catch (const DataError& e) {
      throw DataError(LinePrefix(line_no) + e.what());
    }
    if (!ids.insert(record.id).second) {
      throw DataError(LinePrefix(line_no) + "duplicate record id " +
                      record.id);
    }
    CheckTrainStatus(record);
    CheckDim(record.global_feature, &manifest.feature_dim, record.id);
    for (const auto& p : record.proposals) {
      CheckDim(p.feature, &manifest.feature_dim, record.id);
    }
    if (dropped > 0) {
      local_warnings.push_back("record " + record.id + ": dropped " +
                               std::to_string(dropped) +
                               " degenerate proposal(s)");
    }
    if (record.proposals.empty()) {
      rejected.push_back(record.id);
      continue;
    }
    manifest.records.push_back(std::move(record));
  }
  if (!rejected.empty()) {
    std::string msg = "rejected records without valid proposals:";
    for (const auto& id : rejected) msg += " " + id;
    local_warnings.push_back(std::move(msg));
  }
  manifest.class_name = CommonClass(manifest.records);

  if (warnings != nullptr) {
    warnings->insert(warnings->end(), local_warnings.begin(),
                     local_warnings.end());
  } else {
    for (const auto& w : local_warnings) std::cerr << "warning: " << w << "\n";
  }
  return manifest;
}

void SaveDataset(const DatasetManifest& manifest,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset " + path.string());
  for (const auto& record : manifest.records) {
    out << RecordToJson(record).dump() << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void ValidateManifest(const DatasetManifest& manifest) {
  std::unordered_set<std::string> ids;
  std::size_t dim = manifest.feature_dim;
  for (const auto& record : manifest.records) {
    if (!ids.insert(record.id).second) {
      throw DataError("duplicate record id " + record.id);
    }
    CheckTrainStatus(record);
    CheckDim(record.global_feature, &dim, record.id);
    for (const auto& p : record.proposals) {
      CheckDim(p.feature, &dim, record.id);
      if (!p.box.IsValid()) {
        throw DataError("record " + record.id + ": invalid box");
      }
      if (p.score && !std::isfinite(*p.score)) {
        throw DataError("record " + record.id + ": non-finite score");
      }
    }
  }
}

void SaveScores(std::span<const ScoreEntry> entries,
                const std::filesystem::path& path) {
  std::unordered_set<std::string_view> ids;
  for (const auto& e : entries) {
    if (!ids.insert(e.id).second) {
      throw DataError("duplicate id in score list: " + e.id);
    }
    if (e.id.find_first_of(",\n\r") != std::string::npos) {
      throw DataError("id cannot be written to CSV: " + e.id);
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write scores " + path.string());
  out << "id,score\n";
  for (const auto& e : entries) out << e.id << ',' << FormatScore(e.score) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<ScoreEntry> LoadScores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scores " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "id,score") {
    throw DataError(path.string() + ": expected header 'id,score'");
  }
  std::vector<ScoreEntry> entries;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos || comma == 0) {
      throw DataError(LinePrefix(line_no) + "expected 'id,score'");
    }
    ScoreEntry e;
    e.id = line.substr(0, comma);
    const char* first = line.data() + comma + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, e.score);
    if (ec != std::errc() || ptr != last) {
      throw DataError(LinePrefix(line_no) + "malformed score");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace irreg
