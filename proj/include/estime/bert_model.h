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

#ifndef ESTIME_BERT_MODEL_H_
#define ESTIME_BERT_MODEL_H_

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "estime/backend.h"
#include "estime/safetensors.h"

namespace estime {

struct BertArchitecture {
  int hidden_layers = 12;
  int hidden_size = 768;
  int num_heads = 12;
  int intermediate_size = 3072;
  float layer_norm_eps = 1e-12f;
};

// Post-LayerNorm BERT encoder with the masked-LM head, evaluated on the CPU
// in float32. Weights use the Hugging Face BertForMaskedLM tensor names; the
// decoder matrix falls back to the tied word embeddings when absent.
//
// Const methods are safe to call concurrently; copies share the weights.
class BertEncoder {
 public:
  // Throws kSchema when a tensor is missing or has the wrong shape.
  static BertEncoder FromSafeTensors(const SafeTensors &weights,
                                     const BertArchitecture &arch);

  const BertArchitecture &architecture() const;
  int vocab_size() const;
  int max_positions() const;

  // Hidden states after `layer` encoder layers (0 = embedding output) at the
  // given input positions. `input_ids` is the full model input, delimiters
  // included; `attention_mask` is empty (all ones) or one 0/1 per input.
  std::vector<Embedding> HiddenStates(std::span<const TokenId> input_ids,
                                      std::span<const int> attention_mask,
                                      int layer,
                                      std::span<const std::size_t> positions)
      const;

  // Masked-LM logits over the vocabulary at input position `position`.
  std::vector<float> MaskedLmLogits(std::span<const TokenId> input_ids,
                                    std::span<const int> attention_mask,
                                    std::size_t position) const;

 private:
  struct Weights;
  explicit BertEncoder(std::shared_ptr<const Weights> weights);

  std::shared_ptr<const Weights> weights_;
};

}  // namespace estime

#endif  // ESTIME_BERT_MODEL_H_
