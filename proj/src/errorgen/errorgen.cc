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

#include "estime/errorgen.h"

#include <optional>

#include "estime/error.h"
#include "estime/random.h"

namespace estime {
namespace {

std::optional<TokenId> FirstAcceptable(const std::vector<Candidate> &ranked,
                                       TokenId original,
                                       const Vocabulary &vocab) {
  for (const Candidate &c : ranked) {
    if (c.id == original) continue;
    if (vocab.IsSpecial(c.id) || vocab.IsContinuation(c.id)) continue;
    return c.id;
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::size_t> EligiblePositions(const TokenSequence &tokens) {
  std::vector<std::size_t> eligible;
  const std::size_t n = tokens.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (tokens.word_start[i] && (i + 1 == n || tokens.word_start[i + 1])) {
      eligible.push_back(i);
    }
  }
  return eligible;
}

CorruptedSummary GenerateErrors(std::string_view summary,
                                const ErrorGenConfig &config,
                                MaskedLmBackend &backend) {
  if (config.num_errors < 1) {
    throw Error(ErrorCode::kConfiguration, "number of errors must be >= 1");
  }
  if (config.candidate_depth < 2) {
    throw Error(ErrorCode::kConfiguration, "candidate depth must be >= 2");
  }
  const Vocabulary &vocab = backend.vocabulary();
  const TokenSequence tokens = backend.Tokenize(summary);
  const std::vector<std::size_t> eligible = EligiblePositions(tokens);
  const auto k = static_cast<std::size_t>(config.num_errors);
  if (eligible.size() < k) {
    throw Error(ErrorCode::kInsufficientPositions,
                "summary has " + std::to_string(eligible.size()) +
                    " single-token words, " + std::to_string(k) +
                    " errors requested");
  }

  Rng rng(config.seed);
  const std::vector<std::size_t> picks =
      SampleIndices(eligible.size(), k, rng);

  CorruptedSummary out;
  std::vector<TokenId> corrupted = tokens.ids;
  for (std::size_t pick : picks) {
    const std::size_t pos = eligible[pick];
    const TokenId original = tokens.ids[pos];
    std::optional<TokenId> replacement = FirstAcceptable(
        backend.PredictMasked(tokens, pos, config.candidate_depth), original,
        vocab);
    if (!replacement) {
      replacement = FirstAcceptable(
          backend.PredictMasked(tokens, pos, 5 * config.candidate_depth),
          original, vocab);
    }
    if (!replacement) {
      throw Error(ErrorCode::kNoCandidate,
                  "no whole-word replacement for token '" +
                      vocab.Surface(original) + "' at position " +
                      std::to_string(pos) + " within " +
                      std::to_string(5 * config.candidate_depth) +
                      " candidates");
    }
    corrupted[pos] = *replacement;
    out.errors.push_back({pos,
                          {original, vocab.Surface(original)},
                          {*replacement, vocab.Surface(*replacement)}});
  }
  out.text = backend.Detokenize(corrupted);
  return out;
}

}  // namespace estime
