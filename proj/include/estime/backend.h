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

#ifndef ESTIME_BACKEND_H_
#define ESTIME_BACKEND_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace estime {

using TokenId = std::int32_t;
using Embedding = std::vector<float>;

struct SpecialTokens {
  TokenId pad = 0;
  TokenId unk = 1;
  TokenId cls = 2;
  TokenId sep = 3;
  TokenId mask = 4;
};

// Token inventory of a masked language model. Every id in [0, size) has a
// surface string and a continuation flag; continuation tokens only extend a
// word and never start one.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws kConfiguration when the special ids are out of range or flagged as
  // continuations.
  Vocabulary(std::vector<std::string> surfaces,
             std::vector<bool> is_continuation, SpecialTokens special);

  int size() const { return static_cast<int>(surfaces_.size()); }
  const SpecialTokens &special() const { return special_; }
  TokenId mask_id() const { return special_.mask; }

  bool IsSpecial(TokenId id) const;
  bool IsContinuation(TokenId id) const;
  bool Contains(TokenId id) const { return id >= 0 && id < size(); }
  const std::string &Surface(TokenId id) const;
  // Number of distinct special ids.
  int num_special() const { return static_cast<int>(special_ids_.size()); }
  std::span<const TokenId> special_ids() const { return special_ids_; }

 private:
  std::vector<std::string> surfaces_;
  std::vector<bool> is_continuation_;
  std::vector<bool> is_special_;
  std::vector<TokenId> special_ids_;
  SpecialTokens special_;
};

// Content tokens of one text (no sequence delimiters).
struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<std::string> surfaces;
  std::vector<bool> word_start;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
};

// Builds a TokenSequence from raw ids using the vocabulary's surfaces and
// continuation flags.
TokenSequence MakeTokenSequence(const Vocabulary &vocab,
                                std::vector<TokenId> ids);

struct BackendCapabilities {
  int max_input_tokens = 512;  // counts the delimiters
  int hidden_layers = 1;
  int embedding_dim = 1;
  int num_delimiters = 2;  // [CLS] ... [SEP]

  // Largest content window a single forward pass accepts.
  int max_window() const { return max_input_tokens - num_delimiters; }
};

// Half-open range [begin, end) of content-token indices.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool Contains(std::size_t i) const { return i >= begin && i < end; }
  bool operator==(const IndexRange &) const = default;
};

struct Candidate {
  TokenId id;
  float score;
};

// Uniform interface over a masked language model. Public entry points check
// the preconditions shared by all models and translate content-token indices
// to window-local ones; implementations add the delimiters themselves.
//
// Instances are not thread-safe; create one per worker. Tokenize and
// Detokenize are const and may be shared.
class MaskedLmBackend {
 public:
  virtual ~MaskedLmBackend() = default;

  virtual std::string model_name() const = 0;
  virtual const Vocabulary &vocabulary() const = 0;
  virtual BackendCapabilities capabilities() const = 0;

  virtual TokenSequence Tokenize(std::string_view text) const = 0;
  virtual std::string Detokenize(std::span<const TokenId> ids) const = 0;

  // Returns one embedding_dim vector per mask position, in order: the
  // layer-`layer` hidden state at each masked position when the window's
  // tokens are fed with every mask position replaced by the mask token.
  std::vector<Embedding> EmbedMasked(const TokenSequence &tokens,
                                     IndexRange window,
                                     std::span<const std::size_t> mask_positions,
                                     int layer);

  // Ranks the non-special vocabulary for `position` masked in context. Long
  // inputs are cut to a maximal window centred on the position. Scores are
  // non-increasing; equal scores are ordered by ascending id.
  std::vector<Candidate> PredictMasked(const TokenSequence &tokens,
                                       std::size_t position, int top_k);

 protected:
  // `window_ids` are unmasked content ids; `masked` are window-local indices,
  // strictly increasing. Preconditions are already checked.
  virtual std::vector<Embedding> DoEmbedMasked(
      std::span<const TokenId> window_ids, std::span<const std::size_t> masked,
      int layer) = 0;

  // Scores for every vocabulary id at window-local index `masked`.
  virtual std::vector<float> DoMaskedScores(std::span<const TokenId> window_ids,
                                            std::size_t masked) = 0;
};

using BackendFactory = std::function<std::unique_ptr<MaskedLmBackend>()>;

// Window used by PredictMasked for a sequence of n tokens: the whole sequence
// when it fits, else a max_window()-sized range centred on `position` and
// clamped to [0, n).
IndexRange PredictionWindow(std::size_t n, std::size_t position,
                            const BackendCapabilities &caps);

}  // namespace estime

#endif  // ESTIME_BACKEND_H_
