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

#ifndef ESTIME_SCORER_H_
#define ESTIME_SCORER_H_

#include <cstddef>
#include <functional>
#include <list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "estime/backend.h"

namespace estime {

struct EstimeConfig {
  int window = 450;  // tokens per model input window (W)
  int stride = 8;    // spacing of tokens masked together (L)
  int margin = 50;   // left context kept before the anchor token (M)
  int layer = 24;    // hidden layer the embeddings are read from (H)
  // Only summary tokens whose id occurs in the text are checked.
  bool filter_to_text_tokens = true;
  // When false, summary tokens that continue a word are not checked.
  bool include_continuation_tokens = true;

  bool operator==(const EstimeConfig &) const = default;
};

// Throws kConfiguration unless 0 <= margin < window, 1 <= stride <= window,
// 1 <= layer <= hidden_layers and the window fits the model input.
void ValidateConfig(const EstimeConfig &config,
                    const BackendCapabilities &caps);

struct MaskingPass {
  IndexRange window;
  std::vector<std::size_t> mask_positions;  // strictly increasing

  bool operator==(const MaskingPass &) const = default;
};

struct MaskingPlan {
  std::vector<MaskingPass> passes;
};

// Plans the forward passes that give every one of `n` tokens exactly one
// masked embedding. Each pass anchors on the leftmost token not yet covered,
// opens a window `margin` tokens to its left (clamped at 0, cut at n), and
// masks the anchor plus every stride-th token after it that is still
// uncovered.
MaskingPlan PlanMasking(std::size_t n, const EstimeConfig &config);

// One embedding per token, in token order.
struct EmbeddingTable {
  std::vector<Embedding> vectors;

  std::size_t size() const { return vectors.size(); }
};

EmbeddingTable CollectEmbeddings(const TokenSequence &tokens,
                                 const MaskingPlan &plan,
                                 const EstimeConfig &config,
                                 MaskedLmBackend &backend);

struct TokenMatch {
  std::size_t summary_pos = 0;
  std::size_t text_pos = 0;
  TokenId summary_token = 0;
  TokenId text_token = 0;
  double similarity = 0.0;

  bool operator==(const TokenMatch &) const = default;
};

struct EstimeResult {
  int num_inconsistencies = 0;
  int num_checked = 0;
  std::vector<TokenMatch> matches;

  bool operator==(const EstimeResult &) const = default;
};

// Unnormalized dot product, accumulated in double.
double Similarity(std::span<const float> a, std::span<const float> b);

// Index of the text embedding most similar to `query`; ties go to the lowest
// index. `table` must be non-empty.
std::size_t BestMatch(std::span<const float> query,
                      const EmbeddingTable &table);

// Summary positions that take part in matching under `config`.
std::vector<std::size_t> CheckedPositions(const TokenSequence &summary,
                                          const TokenSequence &text,
                                          const EstimeConfig &config);

EstimeResult MatchAndCount(const TokenSequence &summary_tokens,
                           const EmbeddingTable &summary_table,
                           const TokenSequence &text_tokens,
                           const EmbeddingTable &text_table,
                           const EstimeConfig &config);

// Scores summaries against texts with one backend. Keeps the embedding
// tables of the most recent texts, so consecutive summaries of one text
// embed it only once.
class Scorer {
 public:
  Scorer(MaskedLmBackend &backend, EstimeConfig config,
         std::size_t text_cache_size = 4);

  EstimeResult Score(std::string_view text, std::string_view summary);

  const EstimeConfig &config() const { return config_; }

 private:
  struct CachedText {
    std::string text;
    TokenSequence tokens;
    EmbeddingTable table;
  };

  const CachedText &Text(std::string_view text);

  MaskedLmBackend &backend_;
  EstimeConfig config_;
  std::size_t cache_size_;
  std::list<CachedText> cache_;  // most recent first
};

// Full pipeline for one pair. The metric value is num_inconsistencies; it
// grows with inconsistency, so correlate its negation with quality.
EstimeResult Estime(std::string_view text, std::string_view summary,
                    const EstimeConfig &config, MaskedLmBackend &backend);

struct TextSummary {
  std::string text;
  std::string summary;
};

struct ScoreOutcome {
  std::optional<EstimeResult> result;
  std::string error;  // set when result is empty
};

// Scores every item with `workers` backends created by `factory`. Results are
// returned in input order whatever the scheduling. `on_done`, when set, is
// called for each finished item (serialized, in completion order).
std::vector<ScoreOutcome> ScoreBatch(
    std::span<const TextSummary> items, const EstimeConfig &config,
    const BackendFactory &factory, int workers,
    const std::function<void(std::size_t, const ScoreOutcome &)> &on_done =
        {});

}  // namespace estime

#endif  // ESTIME_SCORER_H_
