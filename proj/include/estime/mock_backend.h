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

#ifndef ESTIME_MOCK_BACKEND_H_
#define ESTIME_MOCK_BACKEND_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "estime/backend.h"

namespace estime {

// Deterministic, context-free stand-in for a masked language model.
//
// Tokenizer: ASCII text is lower-cased and split on whitespace; each ASCII
// punctuation character is a token of its own; letter and digit runs are cut
// into chunks of at most three characters, the first chunk of a word starting
// it and the rest continuing it ("##" surfaces). Other bytes become [UNK].
// The vocabulary enumerates every such chunk, 38813 ids in all.
//
// Embeddings: the vector for a masked position is a pseudo-random unit vector
// seeded by the token id at that position in the unmasked input, so identical
// ids always embed identically whatever the context.
//
// Predictions: the top candidate for a masked token t is the next word-start
// id after t (cyclically, skipping special and continuation ids); the ranking
// continues cyclically through word-start ids and ends with continuation ids.
class MockBackend : public MaskedLmBackend {
 public:
  struct Options {
    int max_input_tokens = 512;
    int hidden_layers = 24;
    int embedding_dim = 32;
  };

  MockBackend();
  explicit MockBackend(Options options);

  std::string model_name() const override { return "mock"; }
  const Vocabulary &vocabulary() const override { return vocab_; }
  BackendCapabilities capabilities() const override;

  TokenSequence Tokenize(std::string_view text) const override;
  std::string Detokenize(std::span<const TokenId> ids) const override;

  // The context-free vector assigned to `id`.
  static Embedding TokenVector(TokenId id, int dim);

  // Id of a whole-word letter chunk ("a" .. "zzz"); -1 if not a valid chunk.
  TokenId WordId(std::string_view chunk) const;

 protected:
  std::vector<Embedding> DoEmbedMasked(std::span<const TokenId> window_ids,
                                       std::span<const std::size_t> masked,
                                       int layer) override;
  std::vector<float> DoMaskedScores(std::span<const TokenId> window_ids,
                                    std::size_t masked) override;

 private:
  Options options_;
  Vocabulary vocab_;
};

}  // namespace estime

#endif  // ESTIME_MOCK_BACKEND_H_
