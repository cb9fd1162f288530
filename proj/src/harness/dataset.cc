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

#include "estime/dataset.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "estime/error.h"
#include "estime/random.h"
#include "estime/score_file.h"
#include "estime/stats.h"
#include "json.hpp"

namespace estime {
namespace {

using nlohmann::json;

json ParseObject(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error &e) {
    throw Error(ErrorCode::kParse, std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::kSchema, "expected a JSON object");
  }
  return j;
}

std::string RequireString(const json &j, const char *field) {
  const auto it = j.find(field);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kSchema,
                std::string("field '") + field + "' must be a string");
  }
  return it->get<std::string>();
}

int RequireScore(const json &value, const std::string &quality) {
  const bool integral =
      value.is_number_integer() ||
      (value.is_number_float() &&
       value.get<double>() == static_cast<int>(value.get<double>()));
  if (!integral) {
    throw Error(ErrorCode::kSchema,
                "annotation for '" + quality + "' must be an integer");
  }
  const int score = static_cast<int>(value.get<double>());
  if (score < 1 || score > 5) {
    throw Error(ErrorCode::kSchema, "annotation for '" + quality +
                                        "' out of range 1..5: " +
                                        std::to_string(score));
  }
  return score;
}

bool IsQuality(std::string_view name) {
  return std::find(kQualities.begin(), kQualities.end(), name) !=
         kQualities.end();
}

// Calls fn(line_number, line) for every non-blank line.
template <typename Fn>
void ForEachLine(const std::filesystem::path &path, Fn fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      fn(number, line);
    } catch (const Error &e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(number) +
                                ": " + e.what());
    }
  }
}

}  // namespace

std::string PairToJsonLine(const PairRecord &record) {
  json j;
  j["id"] = record.id;
  j["text"] = record.text;
  j["summary"] = record.summary;
  if (record.system) j["system"] = *record.system;
  if (!record.quality_scores.empty()) j["quality_scores"] = record.quality_scores;
  if (record.gold_label) j["gold_label"] = *record.gold_label;
  return j.dump();
}

PairRecord ParsePairLine(std::string_view line) {
  const json j = ParseObject(line);
  PairRecord record;
  record.id = RequireString(j, "id");
  record.text = RequireString(j, "text");
  record.summary = RequireString(j, "summary");
  if (record.id.empty()) throw Error(ErrorCode::kSchema, "empty id");

  if (const auto it = j.find("system"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw Error(ErrorCode::kSchema, "field 'system' must be a string");
    }
    record.system = it->get<std::string>();
  }
  if (const auto it = j.find("quality_scores");
      it != j.end() && !it->is_null()) {
    if (!it->is_object()) {
      throw Error(ErrorCode::kSchema, "field 'quality_scores' must be an object");
    }
    for (const auto &[quality, scores] : it->items()) {
      if (!IsQuality(quality)) {
        throw Error(ErrorCode::kSchema, "unknown quality '" + quality + "'");
      }
      if (!scores.is_array() || scores.empty()) {
        throw Error(ErrorCode::kSchema, "annotations for '" + quality +
                                            "' must be a non-empty list");
      }
      std::vector<int> &out = record.quality_scores[quality];
      for (const json &s : scores) out.push_back(RequireScore(s, quality));
    }
  }
  if (const auto it = j.find("gold_label"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() ||
        (it->get<int>() != 0 && it->get<int>() != 1)) {
      throw Error(ErrorCode::kSchema, "field 'gold_label' must be 0 or 1");
    }
    record.gold_label = it->get<int>();
  }
  return record;
}

void CheckUniqueIds(std::span<const PairRecord> records) {
  std::set<std::string_view> seen;
  for (const PairRecord &r : records) {
    if (!seen.insert(r.id).second) {
      throw Error(ErrorCode::kSchema, "duplicate id '" + r.id + "'");
    }
  }
}

std::vector<PairRecord> ReadPairs(const std::filesystem::path &path) {
  std::vector<PairRecord> records;
  std::set<std::string> seen;
  ForEachLine(path, [&](std::size_t, const std::string &line) {
    records.push_back(ParsePairLine(line));
    if (!seen.insert(records.back().id).second) {
      throw Error(ErrorCode::kSchema,
                  "duplicate id '" + records.back().id + "'");
    }
  });
  return records;
}

void WritePairs(const std::filesystem::path &path,
                std::span<const PairRecord> records) {
  std::string content;
  for (const PairRecord &r : records) {
    content += PairToJsonLine(r);
    content += '\n';
  }
  WriteFileAtomically(path, content);
}

std::vector<PairRecord> ReadSummEval(const std::filesystem::path &path) {
  std::filesystem::path file = path;
  if (std::filesystem::is_directory(path)) {
    file = path / "model_annotations.aligned.paired.jsonl";
  }
  std::vector<PairRecord> records;
  std::set<std::string> seen;
  ForEachLine(file, [&](std::size_t, const std::string &line) {
    const json j = ParseObject(line);
    if (!j.contains("text")) {
      throw Error(ErrorCode::kSchema,
                  "no 'text' field; the adapter needs the paired file with "
                  "source documents (model_annotations.aligned.paired.jsonl)");
    }
    PairRecord r;
    const std::string doc = RequireString(j, "id");
    const std::string model = RequireString(j, "model_id");
    r.id = doc + "-" + model;
    r.system = model;
    r.text = RequireString(j, "text");
    r.summary = RequireString(j, "decoded");

    const auto experts = j.find("expert_annotations");
    if (experts == j.end() || !experts->is_array() || experts->empty()) {
      throw Error(ErrorCode::kSchema,
                  "'expert_annotations' must be a non-empty list");
    }
    for (const json &a : *experts) {
      if (!a.is_object()) {
        throw Error(ErrorCode::kSchema,
                    "each expert annotation must be an object");
      }
      for (std::string_view q : kQualities) {
        const std::string quality(q);
        const auto it = a.find(quality);
        if (it == a.end()) {
          throw Error(ErrorCode::kSchema,
                      "expert annotation lacks '" + quality + "'");
        }
        r.quality_scores[quality].push_back(RequireScore(*it, quality));
      }
    }
    if (!seen.insert(r.id).second) {
      throw Error(ErrorCode::kSchema, "duplicate pair '" + r.id + "'");
    }
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<PairRecord> Ingest(const std::filesystem::path &path,
                               InputFormat format) {
  switch (format) {
    case InputFormat::kPairsJsonl:
      return ReadPairs(path);
    case InputFormat::kSummEval:
      return ReadSummEval(path);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown input format");
}

double QualityValue(const PairRecord &record, std::string_view quality) {
  if (quality == kGoldQuality) {
    if (!record.gold_label) {
      throw Error(ErrorCode::kSchema, "pair '" + record.id + "' has no gold_label");
    }
    return *record.gold_label;
  }
  const auto it = record.quality_scores.find(std::string(quality));
  if (it == record.quality_scores.end()) {
    throw Error(ErrorCode::kSchema, "pair '" + record.id + "' has no '" +
                                        std::string(quality) + "' scores");
  }
  return AverageExpertScores(it->second);
}

std::vector<PairRecord> SamplePairs(std::span<const PairRecord> records,
                                    std::size_t count, std::uint64_t seed) {
  if (count > records.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot sample " + std::to_string(count) + " of " +
                    std::to_string(records.size()) + " pairs");
  }
  Rng rng(seed);
  std::vector<PairRecord> out;
  out.reserve(count);
  for (std::size_t i : SampleIndices(records.size(), count, rng)) {
    out.push_back(records[i]);
  }
  return out;
}

}  // namespace estime
