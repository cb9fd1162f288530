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

#include "estime/error.h"
#include "estime/harness.h"
#include "estime/random.h"

namespace estime {
namespace {

nlohmann::json TokenJson(const TokenRef &token) {
  return {{"id", token.id}, {"surface", token.surface}};
}

}  // namespace

std::uint64_t PairSeed(std::uint64_t seed, std::string_view id) {
  return SplitMix64(seed ^ Fnv1a64(id));
}

Benchmark BuildErrorBenchmark(std::span<const PairRecord> pairs,
                              const ErrorGenConfig &config,
                              MaskedLmBackend &backend) {
  CheckUniqueIds(pairs);
  Benchmark out;
  std::vector<PairRecord> corrupted;
  for (const PairRecord &pair : pairs) {
    ErrorGenConfig pair_config = config;
    pair_config.seed = PairSeed(config.seed, pair.id);
    CorruptedSummary result;
    try {
      result = GenerateErrors(pair.summary, pair_config, backend);
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kInsufficientPositions &&
          e.code() != ErrorCode::kNoCandidate) {
        throw;
      }
      out.skipped.push_back({pair.id, e.what()});
      continue;
    }
    PairRecord clean = pair;
    clean.gold_label = 1;
    PairRecord bad = pair;
    bad.id = pair.id + std::string(kCorruptedSuffix);
    bad.summary = std::move(result.text);
    bad.gold_label = 0;
    out.audit.push_back(
        {bad.id, pair.id, pair_config.seed, std::move(result.errors)});
    out.pairs.push_back(std::move(clean));
    corrupted.push_back(std::move(bad));
  }
  for (PairRecord &p : corrupted) out.pairs.push_back(std::move(p));
  CheckUniqueIds(out.pairs);
  return out;
}

std::string AuditToJsonLine(const BenchmarkAudit &audit) {
  nlohmann::json errors = nlohmann::json::array();
  for (const ErrorRecord &e : audit.errors) {
    errors.push_back({{"position", e.position},
                      {"original", TokenJson(e.original)},
                      {"replacement", TokenJson(e.replacement)}});
  }
  nlohmann::json j;
  j["id"] = audit.id;
  j["source_id"] = audit.source_id;
  j["seed"] = audit.seed;
  j["errors"] = std::move(errors);
  return j.dump();
}

ScoreFile NullScores(std::span<const PairRecord> pairs, std::uint64_t seed) {
  ScoreFile file;
  file.meta.measure = "null";
  file.meta.config = {{"seed", seed}};
  for (const PairRecord &p : pairs) {
    Rng rng(PairSeed(seed, p.id));
    file.records.push_back({p.id, "null", UniformUnit(rng), std::nullopt});
  }
  return file;
}

}  // namespace estime
