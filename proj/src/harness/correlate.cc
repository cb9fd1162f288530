// Copyright 2026 The estime Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "estime/error.h"
#include "estime/harness.h"
#include "estime/random.h"

namespace estime {
namespace {

constexpr std::size_t kListedIds = 20;

std::string ListIds(const std::vector<std::string> &ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < kListedIds; ++i) {
    if (i > 0) out += ", ";
    out += ids[i];
  }
  if (ids.size() > kListedIds) {
    out += ", ... (" + std::to_string(ids.size()) + " in total)";
  }
  return out;
}

std::string TextKey(const std::string &text) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(text)));
  return buffer;
}

}  // namespace

std::string_view LevelName(Level level) {
  return level == Level::kSummary ? "summary" : "system";
}

Level ParseLevel(std::string_view name) {
  if (name == "summary") return Level::kSummary;
  if (name == "system") return Level::kSystem;
  throw Error(ErrorCode::kConfiguration,
              "level must be 'summary' or 'system', got '" +
                  std::string(name) + "'");
}

MeasureCorrelation CorrelateScores(std::span<const PairRecord> pairs,
                                   const ScoreFile &scores,
                                   const CorrelateOptions &options) {
  std::map<std::string, double> values;
  for (const ScoreRecord &r : scores.records) values[r.id] = r.value;

  std::vector<const PairRecord *> rows;
  std::vector<std::string> missing;
  std::set<std::string> pair_ids;
  for (const PairRecord &p : pairs) {
    rows.push_back(&p);
    pair_ids.insert(p.id);
    if (!values.contains(p.id)) missing.push_back(p.id);
  }
  std::vector<std::string> extra;
  for (const auto &[id, value] : values) {
    if (!pair_ids.contains(id)) extra.push_back(id);
  }
  std::sort(missing.begin(), missing.end());
  if (!missing.empty() || !extra.empty()) {
    std::string message = "ids of pairs and '" + scores.meta.measure +
                          "' scores differ";
    if (!missing.empty()) message += "; missing scores: " + ListIds(missing);
    if (!extra.empty()) message += "; unknown ids: " + ListIds(extra);
    throw Error(ErrorCode::kMissingIds, message);
  }
  std::sort(rows.begin(), rows.end(),
            [](const PairRecord *a, const PairRecord *b) { return a->id < b->id; });

  const double sign = scores.meta.negative_sense ? -1.0 : 1.0;
  std::vector<double> x;
  std::vector<double> y;
  if (options.level == Level::kSummary) {
    for (const PairRecord *p : rows) {
      x.push_back(sign * values.at(p->id));
      y.push_back(QualityValue(*p, options.quality));
    }
  } else {
    std::vector<SystemScore> measure_cells;
    std::vector<SystemScore> quality_cells;
    for (const PairRecord *p : rows) {
      if (!p->system) {
        throw Error(ErrorCode::kSchema,
                    "pair '" + p->id + "' has no system for system-level use");
      }
      const std::string key = TextKey(p->text);
      measure_cells.push_back({*p->system, key, sign * values.at(p->id)});
      quality_cells.push_back({*p->system, key, QualityValue(*p, options.quality)});
    }
    x = SystemLevel(measure_cells).values;
    y = SystemLevel(quality_cells).values;
  }

  MeasureCorrelation result;
  result.measure = scores.meta.measure;
  result.negative_sense = scores.meta.negative_sense;
  result.quality = options.quality;
  result.level = options.level;
  result.report = Correlate(x, y, options.permutation);
  return result;
}

nlohmann::json ReportToJson(std::span<const MeasureCorrelation> results,
                            const CorrelateOptions &options) {
  nlohmann::json j;
  j["quality"] = options.quality;
  j["level"] = LevelName(options.level);
  j["permutations"] = options.permutation.permutations;
  j["seed"] = options.permutation.seed;
  nlohmann::json rows = nlohmann::json::array();
  for (const MeasureCorrelation &r : results) {
    rows.push_back({{"measure", r.measure},
                    {"negative_sense", r.negative_sense},
                    {"n", r.report.n},
                    {"rho", r.report.rho},
                    {"rho_p", r.report.rho_p},
                    {"tau_c", r.report.tau_c},
                    {"tau_p", r.report.tau_p}});
  }
  j["results"] = std::move(rows);
  return j;
}

}  // namespace estime
