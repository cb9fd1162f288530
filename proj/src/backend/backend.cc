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

#include "estime/backend.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "estime/error.h"

namespace estime {

Vocabulary::Vocabulary(std::vector<std::string> surfaces,
                       std::vector<bool> is_continuation,
                       SpecialTokens special)
    : surfaces_(std::move(surfaces)),
      is_continuation_(std::move(is_continuation)),
      special_(special) {
  if (surfaces_.empty()) {
    throw Error(ErrorCode::kConfiguration, "vocabulary is empty");
  }
  if (is_continuation_.size() != surfaces_.size()) {
    throw Error(ErrorCode::kConfiguration,
                "continuation flags do not cover the vocabulary");
  }
  is_special_.assign(surfaces_.size(), false);
  for (TokenId id : {special.pad, special.unk, special.cls, special.sep,
                     special.mask}) {
    if (!Contains(id)) {
      throw Error(ErrorCode::kConfiguration,
                  "special token id " + std::to_string(id) +
                      " outside vocabulary of size " +
                      std::to_string(size()));
    }
    if (is_continuation_[id]) {
      throw Error(ErrorCode::kConfiguration,
                  "special token id " + std::to_string(id) +
                      " is marked as a continuation token");
    }
    if (!is_special_[id]) special_ids_.push_back(id);
    is_special_[id] = true;
  }
  std::sort(special_ids_.begin(), special_ids_.end());
}

bool Vocabulary::IsSpecial(TokenId id) const {
  return Contains(id) && is_special_[id];
}

bool Vocabulary::IsContinuation(TokenId id) const {
  return Contains(id) && is_continuation_[id];
}

const std::string &Vocabulary::Surface(TokenId id) const {
  if (!Contains(id)) {
    throw Error(ErrorCode::kInvalidArgument,
                "token id " + std::to_string(id) + " outside vocabulary");
  }
  return surfaces_[id];
}

TokenSequence MakeTokenSequence(const Vocabulary &vocab,
                                std::vector<TokenId> ids) {
  TokenSequence seq;
  seq.surfaces.reserve(ids.size());
  seq.word_start.reserve(ids.size());
  for (TokenId id : ids) {
    seq.surfaces.push_back(vocab.Surface(id));
    seq.word_start.push_back(!vocab.IsContinuation(id));
  }
  seq.ids = std::move(ids);
  return seq;
}

IndexRange PredictionWindow(std::size_t n, std::size_t position,
                            const BackendCapabilities &caps) {
  const auto width = static_cast<std::size_t>(caps.max_window());
  if (n <= width) return {0, n};
  std::size_t start = position > width / 2 ? position - width / 2 : 0;
  start = std::min(start, n - width);
  return {start, start + width};
}

std::vector<Embedding> MaskedLmBackend::EmbedMasked(
    const TokenSequence &tokens, IndexRange window,
    std::span<const std::size_t> mask_positions, int layer) {
  const BackendCapabilities caps = capabilities();
  if (window.begin > window.end || window.end > tokens.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "window [" + std::to_string(window.begin) + ", " +
                    std::to_string(window.end) +
                    ") outside sequence of length " +
                    std::to_string(tokens.size()));
  }
  if (window.size() > static_cast<std::size_t>(caps.max_window())) {
    throw Error(ErrorCode::kInputSize,
                "window of " + std::to_string(window.size()) +
                    " tokens exceeds model input limit of " +
                    std::to_string(caps.max_input_tokens) +
                    " (including delimiters)");
  }
  if (layer < 1 || layer > caps.hidden_layers) {
    throw Error(ErrorCode::kConfiguration,
                "layer " + std::to_string(layer) + " outside [1, " +
                    std::to_string(caps.hidden_layers) + "]");
  }
  std::vector<std::size_t> local;
  local.reserve(mask_positions.size());
  for (std::size_t i = 0; i < mask_positions.size(); ++i) {
    const std::size_t pos = mask_positions[i];
    if (!window.Contains(pos)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mask position " + std::to_string(pos) + " outside window");
    }
    if (i > 0 && pos <= mask_positions[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mask positions must be strictly increasing");
    }
    local.push_back(pos - window.begin);
  }
  if (local.empty()) return {};

  std::span<const TokenId> ids(tokens.ids);
  std::vector<Embedding> out =
      DoEmbedMasked(ids.subspan(window.begin, window.size()), local, layer);
  if (out.size() != local.size()) {
    throw Error(ErrorCode::kBackend, "backend returned " +
                                         std::to_string(out.size()) +
                                         " embeddings for " +
                                         std::to_string(local.size()) +
                                         " masked positions");
  }
  for (const Embedding &e : out) {
    if (e.size() != static_cast<std::size_t>(caps.embedding_dim)) {
      throw Error(ErrorCode::kBackend, "embedding has wrong dimension");
    }
    for (float v : e) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kBackend, "embedding is not finite");
      }
    }
  }
  return out;
}

std::vector<Candidate> MaskedLmBackend::PredictMasked(
    const TokenSequence &tokens, std::size_t position, int top_k) {
  if (position >= tokens.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "position " + std::to_string(position) +
                    " outside sequence of length " +
                    std::to_string(tokens.size()));
  }
  if (top_k < 1) {
    throw Error(ErrorCode::kInvalidArgument, "top_k must be positive");
  }
  const Vocabulary &vocab = vocabulary();
  const IndexRange window =
      PredictionWindow(tokens.size(), position, capabilities());
  std::span<const TokenId> ids(tokens.ids);
  const std::vector<float> scores = DoMaskedScores(
      ids.subspan(window.begin, window.size()), position - window.begin);
  if (scores.size() != static_cast<std::size_t>(vocab.size())) {
    throw Error(ErrorCode::kBackend, "score vector does not cover vocabulary");
  }

  std::vector<TokenId> order;
  order.reserve(scores.size());
  for (TokenId id = 0; id < vocab.size(); ++id) {
    if (!vocab.IsSpecial(id)) order.push_back(id);
  }
  const std::size_t keep =
      std::min(order.size(), static_cast<std::size_t>(top_k));
  auto better = [&scores](TokenId a, TokenId b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + keep, order.end(), better);

  std::vector<Candidate> ranked;
  ranked.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    ranked.push_back({order[i], scores[order[i]]});
  }
  return ranked;
}

}  // namespace estime
