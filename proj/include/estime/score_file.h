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

#ifndef ESTIME_SCORE_FILE_H_
#define ESTIME_SCORE_FILE_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace estime {

// Header line of a scores-jsonl file:
//   {"meta": {"measure": "ESTIME-24", "negative_sense": true, "config": {}}}
struct ScoreMeta {
  std::string measure;
  bool negative_sense = false;
  nlohmann::json config = nlohmann::json::object();

  bool operator==(const ScoreMeta &) const = default;
};

struct ScoreRecord {
  std::string id;
  std::string measure;
  double value = 0.0;
  std::optional<nlohmann::json> detail;

  bool operator==(const ScoreRecord &) const = default;
};

struct ScoreFile {
  ScoreMeta meta;
  std::vector<ScoreRecord> records;
};

std::string MetaToJsonLine(const ScoreMeta &meta);
std::string ScoreToJsonLine(const ScoreRecord &record);

// Throws kParse / kSchema.
ScoreMeta ParseMetaLine(std::string_view line);
ScoreRecord ParseScoreLine(std::string_view line);

// Requires the header first and one record per id, all carrying the header's
// measure name.
ScoreFile ReadScoreFile(const std::filesystem::path &path);

// Writes through a temporary file that is renamed into place.
void WriteScoreFile(const std::filesystem::path &path, const ScoreFile &file);

// Writes `content` to a sibling temporary file and renames it onto `path`.
void WriteFileAtomically(const std::filesystem::path &path,
                         std::string_view content);

}  // namespace estime

#endif  // ESTIME_SCORE_FILE_H_
