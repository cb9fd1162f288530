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

#ifndef ESTIME_DATASET_H_
#define ESTIME_DATASET_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace estime {

inline constexpr std::array<std::string_view, 4> kQualities = {
    "coherence", "consistency", "fluency", "relevance"};

// Quality name selecting gold_label instead of expert annotations.
inline constexpr std::string_view kGoldQuality = "gold";

struct PairRecord {
  std::string id;
  std::string text;
  std::string summary;
  std::optional<std::string> system;
  // Raw expert annotations per quality; an empty map means none.
  std::map<std::string, std::vector<int>> quality_scores;
  std::optional<int> gold_label;  // 1 clean, 0 corrupted

  bool operator==(const PairRecord &) const = default;
};

// One pairs-jsonl line (no trailing newline). Keys are emitted sorted and
// absent optionals are omitted, so equal records serialize identically.
std::string PairToJsonLine(const PairRecord &record);

// Throws kParse for malformed JSON and kSchema for missing or mistyped
// fields, out-of-range annotations and empty annotation lists.
PairRecord ParsePairLine(std::string_view line);

// Reads a pairs-jsonl file. Blank lines are ignored; errors name the line.
// Ids must be unique.
std::vector<PairRecord> ReadPairs(const std::filesystem::path &path);

// Writes through a temporary file that is renamed into place.
void WritePairs(const std::filesystem::path &path,
                std::span<const PairRecord> records);

// Reads SummEval's model_annotations.aligned.paired.jsonl (or a directory
// containing it). Each line is one machine summary:
//   id                 source document id
//   model_id           system id, e.g. "M11"
//   text               source document
//   decoded            machine summary
//   expert_annotations three objects with the four qualities, each 1..5
// and becomes the PairRecord {id: "<id>-<model_id>", system: model_id}.
// References and crowd annotations are dropped.
std::vector<PairRecord> ReadSummEval(const std::filesystem::path &path);

enum class InputFormat { kPairsJsonl, kSummEval };

std::vector<PairRecord> Ingest(const std::filesystem::path &path,
                               InputFormat format);

// Throws kSchema unless every id is distinct.
void CheckUniqueIds(std::span<const PairRecord> records);

// Mean expert score for `quality`, or gold_label for kGoldQuality. Throws
// kSchema when the record has neither.
double QualityValue(const PairRecord &record, std::string_view quality);

// `count` records chosen uniformly without replacement, in input order.
std::vector<PairRecord> SamplePairs(std::span<const PairRecord> records,
                                    std::size_t count, std::uint64_t seed);

}  // namespace estime

#endif  // ESTIME_DATASET_H_
