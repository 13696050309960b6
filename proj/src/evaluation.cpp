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

#include "irreg/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "irreg/error.hpp"

namespace irreg {
namespace {

void CheckInputs(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) {
    throw DataError("labels and scores differ in length");
  }
  for (int l : labels) {
    if (l != 1 && l != -1) throw DataError("labels must be +1 or -1");
  }
}

// Indices by descending score, ties in input order.
std::vector<std::size_t> RankOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return scores[l] > scores[r];
  });
  return order;
}

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
  return buf;
}

}  // namespace

double AveragePrecision(std::span<const int> labels,
                        std::span<const double> scores) {
  CheckInputs(labels, scores);
  const auto order = RankOrder(scores);
  std::size_t hits = 0;
  double sum = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  if (hits == 0) throw DataError("average precision needs a positive label");
  return sum / static_cast<double>(hits);
}

RocResult RocAuc(std::span<const int> labels, std::span<const double> scores) {
  CheckInputs(labels, scores);
  const auto pos = static_cast<std::size_t>(
      std::count(labels.begin(), labels.end(), 1));
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) {
    throw DataError("ROC needs both positive and negative labels");
  }
  const auto order = RankOrder(scores);
  RocResult out;
  out.points.push_back({0, 0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  double area = 0;
  for (std::size_t i = 0; i < order.size();) {
    // Consume a block of tied scores at once.
    std::size_t block_tp = 0;
    std::size_t block_fp = 0;
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      (labels[order[i]] == 1 ? block_tp : block_fp) += 1;
    }
    // Pairs beaten by this block, plus half of the pairs tied within it.
    area += static_cast<double>(block_fp) *
            (static_cast<double>(tp) + 0.5 * static_cast<double>(block_tp));
    tp += block_tp;
    fp += block_fp;
    out.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                          static_cast<double>(tp) / static_cast<double>(pos)});
  }
  out.auc = area / (static_cast<double>(pos) * static_cast<double>(neg));
  return out;
}

EvalReport Evaluate(const DatasetManifest& manifest,
                    const std::unordered_map<std::string, double>& scores,
                    std::span<const std::string> classes) {
  std::vector<std::string> wanted(classes.begin(), classes.end());
  if (wanted.empty()) {
    std::set<std::string> seen;
    for (const auto& r : manifest.records) {
      if (r.split == Split::kTest) seen.insert(r.class_name);
    }
    wanted.assign(seen.begin(), seen.end());
  }
  if (wanted.empty()) throw DataError("no test images to evaluate");

  EvalReport report;
  for (const auto& cls : wanted) {
    std::vector<int> labels;
    std::vector<double> values;
    for (const auto& r : manifest.records) {
      if (r.split != Split::kTest || r.class_name != cls) continue;
      const auto it = scores.find(r.id);
      if (it == scores.end()) {
        throw DataError("no score for test image " + r.id);
      }
      labels.push_back(r.status == Status::kIrregular ? 1 : -1);
      values.push_back(it->second);
    }
    if (labels.empty()) throw DataError("class " + cls + " has no test images");
    ClassMetrics m;
    m.ap = AveragePrecision(labels, values);
    RocResult roc = RocAuc(labels, values);
    m.auc = roc.auc;
    m.roc = std::move(roc.points);
    m.num_positive = static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), 1));
    m.num_negative = labels.size() - m.num_positive;
    report.per_class.emplace(cls, std::move(m));
  }
  double sum = 0;
  for (const auto& [cls, m] : report.per_class) sum += m.ap;
  report.map = sum / static_cast<double>(report.per_class.size());
  return report;
}

nlohmann::ordered_json ReportToJson(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["map"] = report.map;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (const auto& [cls, m] : report.per_class) {
    nlohmann::ordered_json c;
    c["ap"] = m.ap;
    c["auc"] = m.auc;
    c["num_positive"] = m.num_positive;
    c["num_negative"] = m.num_negative;
    nlohmann::ordered_json roc = nlohmann::ordered_json::array();
    for (const auto& p : m.roc) roc.push_back({p.fpr, p.tpr});
    c["roc"] = std::move(roc);
    per_class[cls] = std::move(c);
  }
  j["per_class"] = std::move(per_class);
  return j;
}

nlohmann::ordered_json ReportsToJson(
    const std::map<std::string, EvalReport>& reports) {
  nlohmann::ordered_json methods = nlohmann::ordered_json::object();
  for (const auto& [name, report] : reports) methods[name] = ReportToJson(report);
  nlohmann::ordered_json j;
  j["methods"] = std::move(methods);
  return j;
}

std::string FormatReportTable(const std::map<std::string, EvalReport>& reports) {
  std::set<std::string> classes;
  for (const auto& [name, report] : reports) {
    for (const auto& [cls, m] : report.per_class) classes.insert(cls);
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Methods"};
  header.insert(header.end(), classes.begin(), classes.end());
  header.push_back("mAP");
  rows.push_back(header);
  for (const auto& [name, report] : reports) {
    std::vector<std::string> row{name};
    for (const auto& cls : classes) {
      const auto it = report.per_class.find(cls);
      row.push_back(it == report.per_class.end() ? "-" : Percent(it->second.ap));
    }
    row.push_back(Percent(report.map));
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c > 0) out << "  ";
      out << rows[r][c];
      if (c + 1 < rows[r].size()) {
        out << std::string(width[c] - rows[r][c].size(), ' ');
      }
    }
    out << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w + 2;
      out << std::string(total - 2, '-') << '\n';
    }
  }
  return out.str();
}

void WriteRocCsv(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "class,fpr,tpr\n";
  char buf[96];
  for (const auto& [cls, m] : report.per_class) {
    for (const auto& p : m.roc) {
      std::snprintf(buf, sizeof(buf), ",%.9g,%.9g\n", p.fpr, p.tpr);
      out << cls << buf;
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace irreg
