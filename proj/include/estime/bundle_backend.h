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

#ifndef ESTIME_BUNDLE_BACKEND_H_
#define ESTIME_BUNDLE_BACKEND_H_

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "estime/backend.h"
#include "estime/bert_model.h"
#include "estime/wordpiece.h"

namespace estime {

// manifest.json of a model bundle directory. Example:
//
//   {"format_version": 1, "architecture": "bert",
//    "model_name": "bert-large-uncased-whole-word-masking",
//    "hidden_layers": 24, "embedding_dim": 1024, "max_input_tokens": 512,
//    "num_attention_heads": 16, "intermediate_size": 4096,
//    "layer_norm_eps": 1e-12, "hidden_act": "gelu",
//    "graph_file": "model.safetensors", "tokenizer_file": "vocab.txt",
//    "do_lower_case": true,
//    "special_token_ids": {"pad": 0, "unk": 100, "cls": 101, "sep": 102,
//                          "mask": 103},
//    "checksum": "sha256:<hex of graph_file>"}
//
// The graph file holds every encoder layer plus the masked-LM head; inputs
// are token ids and an attention mask.
struct BundleManifest {
  std::string model_name;
  int hidden_layers = 0;
  int embedding_dim = 0;
  int max_input_tokens = 0;
  int num_attention_heads = 0;
  int intermediate_size = 0;
  float layer_norm_eps = 1e-12f;
  std::string graph_file = "model.safetensors";
  std::string tokenizer_file = "vocab.txt";
  bool do_lower_case = true;
  SpecialTokens special;
  std::string checksum;  // "sha256:<hex>", optional

  // Throws kIo / kSchema with the offending field named.
  static BundleManifest Load(const std::filesystem::path &bundle_dir);
};

std::string Sha256File(const std::filesystem::path &path);

// A loaded bundle. The weights and tokenizer are immutable and shared by all
// backends created from it.
class ModelBundle {
 public:
  // Checks the checksum (when given) and that the graph matches the
  // manifest's layer count, width and input limit.
  static std::shared_ptr<const ModelBundle> Load(
      const std::filesystem::path &bundle_dir);

  const BundleManifest &manifest() const { return manifest_; }
  const BertEncoder &encoder() const { return encoder_; }
  const WordPieceTokenizer &tokenizer() const { return tokenizer_; }

 private:
  ModelBundle(BundleManifest manifest, BertEncoder encoder,
              WordPieceTokenizer tokenizer);

  BundleManifest manifest_;
  BertEncoder encoder_;
  WordPieceTokenizer tokenizer_;
};

class BundleBackend : public MaskedLmBackend {
 public:
  explicit BundleBackend(std::shared_ptr<const ModelBundle> bundle);

  std::string model_name() const override;
  const Vocabulary &vocabulary() const override;
  BackendCapabilities capabilities() const override;
  TokenSequence Tokenize(std::string_view text) const override;
  std::string Detokenize(std::span<const TokenId> ids) const override;

 protected:
  std::vector<Embedding> DoEmbedMasked(std::span<const TokenId> window_ids,
                                       std::span<const std::size_t> masked,
                                       int layer) override;
  std::vector<float> DoMaskedScores(std::span<const TokenId> window_ids,
                                    std::size_t masked) override;

 private:
  std::vector<TokenId> ModelInput(std::span<const TokenId> window_ids,
                                  std::span<const std::size_t> masked) const;

  std::shared_ptr<const ModelBundle> bundle_;
};

// Factory producing backends over one shared bundle.
BackendFactory BundleBackendFactory(std::shared_ptr<const ModelBundle> bundle);

}  // namespace estime

#endif  // ESTIME_BUNDLE_BACKEND_H_
