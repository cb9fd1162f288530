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

#ifndef ESTIME_ERRORGEN_H_
#define ESTIME_ERRORGEN_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "estime/backend.h"

namespace estime {

struct ErrorGenConfig {
  int num_errors = 3;
  std::uint64_t seed = 0;
  // Ranked candidates requested per masked token; deepened once to 5x when
  // none of them qualifies.
  int candidate_depth = 20;
};

struct TokenRef {
  TokenId id = 0;
  std::string surface;

  bool operator==(const TokenRef &) const = default;
};

struct ErrorRecord {
  std::size_t position = 0;  // token index in the clean summary
  TokenRef original;
  TokenRef replacement;

  bool operator==(const ErrorRecord &) const = default;
};

struct CorruptedSummary {
  std::string text;
  std::vector<ErrorRecord> errors;  // ascending positions
};

// Positions holding a complete single-token word: the token starts a word
// and the next token (if any) starts another one.
std::vector<std::size_t> EligiblePositions(const TokenSequence &tokens);

// Replaces `num_errors` randomly chosen single-token words of `summary` with
// the language model's best-ranked differing whole-word candidate. Every
// prediction sees the clean summary, so substitutions do not interact.
//
// Throws kConfiguration for an invalid config, kInsufficientPositions when
// the summary has fewer eligible words than requested, and kNoCandidate when
// no acceptable replacement appears even at the deepened depth.
CorruptedSummary GenerateErrors(std::string_view summary,
                                const ErrorGenConfig &config,
                                MaskedLmBackend &backend);

}  // namespace estime

#endif  // ESTIME_ERRORGEN_H_
