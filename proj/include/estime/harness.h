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

#ifndef ESTIME_HARNESS_H_
#define ESTIME_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "estime/backend.h"
#include "estime/dataset.h"
#include "estime/errorgen.h"
#include "estime/score_file.h"
#include "estime/scorer.h"
#include "estime/stats.h"
#include "json.hpp"

namespace estime {

// Scoring driver.

struct RunScoreOptions {
  EstimeConfig config;
  std::string measure;  // defaults to "ESTIME-<layer>"
  int workers = 1;
  bool include_matches = false;
  // Stop after computing this many new items, leaving the journal behind.
  std::optional<std::size_t> max_new_items;
};

struct RunScoreSummary {
  std::size_t total = 0;
  std::size_t resumed = 0;   // taken from the journal
  std::size_t computed = 0;  // scored in this run
  std::vector<std::pair<std::string, std::string>> failures;  // id, message
  bool complete = false;     // output written

  bool ok() const { return complete && failures.empty(); }
};

// Header written for a run; the journal must carry the same one to resume.
ScoreMeta RunScoreMeta(const RunScoreOptions &options,
                       const std::string &model_name);

std::filesystem::path JournalPath(const std::filesystem::path &out);

// Scores every pair into `out` (records in input order). Completed items are
// appended to `<out>.journal` as they finish, so a rerun after an interrupt
// only scores what is missing. The journal is deleted once every item has
// succeeded; after failures it is kept so that a rerun retries only those.
RunScoreSummary RunScore(std::span<const PairRecord> pairs,
                         const BackendFactory &factory,
                         const RunScoreOptions &options,
                         const std::filesystem::path &out);

// Correlation driver.

enum class Level { kSummary, kSystem };

std::string_view LevelName(Level level);
Level ParseLevel(std::string_view name);

struct CorrelateOptions {
  std::string quality = "consistency";
  Level level = Level::kSummary;
  PermutationOptions permutation;
};

struct MeasureCorrelation {
  std::string measure;
  bool negative_sense = false;
  std::string quality;
  Level level = Level::kSummary;
  CorrelationReport report;
};

// Correlates one score file against the pairs' quality. Rows are taken in id
// order, so the result does not depend on file order. Negative-sense
// measures are negated first. At system level, both sides are averaged per
// system over texts (texts grouped by content). Throws kMissingIds when the
// ids of pairs and scores differ.
MeasureCorrelation CorrelateScores(std::span<const PairRecord> pairs,
                                   const ScoreFile &scores,
                                   const CorrelateOptions &options);

nlohmann::json ReportToJson(std::span<const MeasureCorrelation> results,
                            const CorrelateOptions &options);

// Subtle-error benchmark.

inline constexpr std::string_view kCorruptedSuffix = "#corrupted";

struct BenchmarkAudit {
  std::string id;         // corrupted pair id
  std::string source_id;  // clean pair id
  std::uint64_t seed = 0;
  std::vector<ErrorRecord> errors;
};

struct BenchmarkSkip {
  std::string id;
  std::string reason;
};

struct Benchmark {
  std::vector<PairRecord> pairs;  // clean pairs, then corrupted pairs
  std::vector<BenchmarkAudit> audit;
  std::vector<BenchmarkSkip> skipped;
};

// Seed used for one pair, derived from the run seed and the pair id so that
// a pair's errors do not depend on the rest of the dataset.
std::uint64_t PairSeed(std::uint64_t seed, std::string_view id);

// For each pair, a clean copy (gold 1) and a copy with config.num_errors
// substitutions (gold 0, id + kCorruptedSuffix). Pairs whose summary cannot
// take that many errors are skipped and reported.
Benchmark BuildErrorBenchmark(std::span<const PairRecord> pairs,
                              const ErrorGenConfig &config,
                              MaskedLmBackend &backend);

std::string AuditToJsonLine(const BenchmarkAudit &audit);

// Null measure: uniform random values in [0, 1), seeded per id.
ScoreFile NullScores(std::span<const PairRecord> pairs, std::uint64_t seed);

}  // namespace estime

#endif  // ESTIME_HARNESS_H_
