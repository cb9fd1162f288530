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

#include "estime/bundle_backend.h"

#include <openssl/evp.h>

#include <array>
#include <fstream>

#include "estime/error.h"
#include "json.hpp"

namespace estime {
namespace {

template <typename T>
T Field(const nlohmann::json &j, const char *name,
        const std::filesystem::path &path) {
  if (!j.contains(name)) {
    throw Error(ErrorCode::kSchema,
                path.string() + ": missing field '" + name + "'");
  }
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception &) {
    throw Error(ErrorCode::kSchema,
                path.string() + ": field '" + name + "' has the wrong type");
  }
}

}  // namespace

BundleManifest BundleManifest::Load(const std::filesystem::path &bundle_dir) {
  const std::filesystem::path path = bundle_dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }

  const int version = j.value("format_version", 1);
  if (version != 1) {
    throw Error(ErrorCode::kSchema, path.string() +
                                        ": unsupported format_version " +
                                        std::to_string(version));
  }
  const std::string arch = j.value("architecture", std::string("bert"));
  if (arch != "bert") {
    throw Error(ErrorCode::kSchema,
                path.string() + ": unsupported architecture " + arch);
  }
  const std::string act = j.value("hidden_act", std::string("gelu"));
  if (act != "gelu") {
    throw Error(ErrorCode::kSchema,
                path.string() + ": unsupported activation " + act);
  }

  BundleManifest m;
  m.model_name = Field<std::string>(j, "model_name", path);
  m.hidden_layers = Field<int>(j, "hidden_layers", path);
  m.embedding_dim = Field<int>(j, "embedding_dim", path);
  m.max_input_tokens = Field<int>(j, "max_input_tokens", path);
  m.num_attention_heads = Field<int>(j, "num_attention_heads", path);
  m.intermediate_size = Field<int>(j, "intermediate_size", path);
  m.layer_norm_eps = j.value("layer_norm_eps", 1e-12f);
  m.graph_file = j.value("graph_file", m.graph_file);
  m.tokenizer_file = j.value("tokenizer_file", m.tokenizer_file);
  m.do_lower_case = j.value("do_lower_case", true);
  m.checksum = j.value("checksum", std::string());
  const auto special = Field<nlohmann::json>(j, "special_token_ids", path);
  m.special.pad = Field<TokenId>(special, "pad", path);
  m.special.unk = Field<TokenId>(special, "unk", path);
  m.special.cls = Field<TokenId>(special, "cls", path);
  m.special.sep = Field<TokenId>(special, "sep", path);
  m.special.mask = Field<TokenId>(special, "mask", path);

  if (m.hidden_layers < 1 || m.embedding_dim < 1 || m.max_input_tokens < 3 ||
      m.num_attention_heads < 1 || m.intermediate_size < 1) {
    throw Error(ErrorCode::kSchema,
                path.string() + ": non-positive model dimensions");
  }
  return m;
}

std::string Sha256File(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), buffer.size());
    EVP_DigestUpdate(ctx.get(), buffer.data(),
                     static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &length);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

ModelBundle::ModelBundle(BundleManifest manifest, BertEncoder encoder,
                         WordPieceTokenizer tokenizer)
    : manifest_(std::move(manifest)),
      encoder_(std::move(encoder)),
      tokenizer_(std::move(tokenizer)) {}

std::shared_ptr<const ModelBundle> ModelBundle::Load(
    const std::filesystem::path &bundle_dir) {
  BundleManifest manifest = BundleManifest::Load(bundle_dir);
  const std::filesystem::path graph = bundle_dir / manifest.graph_file;
  if (!manifest.checksum.empty()) {
    const std::string prefix = "sha256:";
    if (!manifest.checksum.starts_with(prefix)) {
      throw Error(ErrorCode::kSchema,
                  "unsupported checksum scheme: " + manifest.checksum);
    }
    const std::string actual = Sha256File(graph);
    if (manifest.checksum.substr(prefix.size()) != actual) {
      throw Error(ErrorCode::kSchema,
                  graph.string() + " does not match the manifest checksum");
    }
  }

  BertArchitecture arch;
  arch.hidden_layers = manifest.hidden_layers;
  arch.hidden_size = manifest.embedding_dim;
  arch.num_heads = manifest.num_attention_heads;
  arch.intermediate_size = manifest.intermediate_size;
  arch.layer_norm_eps = manifest.layer_norm_eps;
  BertEncoder encoder =
      BertEncoder::FromSafeTensors(SafeTensors::Load(graph), arch);
  if (manifest.max_input_tokens > encoder.max_positions()) {
    throw Error(ErrorCode::kSchema,
                "manifest max_input_tokens " +
                    std::to_string(manifest.max_input_tokens) +
                    " exceeds the graph's " +
                    std::to_string(encoder.max_positions()) + " positions");
  }

  WordPieceTokenizer::Options options;
  options.do_lower_case = manifest.do_lower_case;
  WordPieceTokenizer tokenizer(
      WordPieceTokenizer::ReadVocabFile(bundle_dir / manifest.tokenizer_file),
      manifest.special, options);
  if (tokenizer.vocabulary().size() != encoder.vocab_size()) {
    throw Error(ErrorCode::kSchema,
                "tokenizer has " +
                    std::to_string(tokenizer.vocabulary().size()) +
                    " tokens but the graph expects " +
                    std::to_string(encoder.vocab_size()));
  }
  return std::shared_ptr<const ModelBundle>(new ModelBundle(
      std::move(manifest), std::move(encoder), std::move(tokenizer)));
}

BundleBackend::BundleBackend(std::shared_ptr<const ModelBundle> bundle)
    : bundle_(std::move(bundle)) {}

std::string BundleBackend::model_name() const {
  return bundle_->manifest().model_name;
}

const Vocabulary &BundleBackend::vocabulary() const {
  return bundle_->tokenizer().vocabulary();
}

BackendCapabilities BundleBackend::capabilities() const {
  BackendCapabilities caps;
  caps.max_input_tokens = bundle_->manifest().max_input_tokens;
  caps.hidden_layers = bundle_->manifest().hidden_layers;
  caps.embedding_dim = bundle_->manifest().embedding_dim;
  return caps;
}

TokenSequence BundleBackend::Tokenize(std::string_view text) const {
  return bundle_->tokenizer().Tokenize(text);
}

std::string BundleBackend::Detokenize(std::span<const TokenId> ids) const {
  return bundle_->tokenizer().Detokenize(ids);
}

std::vector<TokenId> BundleBackend::ModelInput(
    std::span<const TokenId> window_ids,
    std::span<const std::size_t> masked) const {
  const SpecialTokens &special = bundle_->manifest().special;
  std::vector<TokenId> input;
  input.reserve(window_ids.size() + 2);
  input.push_back(special.cls);
  input.insert(input.end(), window_ids.begin(), window_ids.end());
  input.push_back(special.sep);
  for (std::size_t m : masked) input[m + 1] = special.mask;
  return input;
}

std::vector<Embedding> BundleBackend::DoEmbedMasked(
    std::span<const TokenId> window_ids, std::span<const std::size_t> masked,
    int layer) {
  const std::vector<TokenId> input = ModelInput(window_ids, masked);
  std::vector<std::size_t> positions(masked.begin(), masked.end());
  for (std::size_t &p : positions) ++p;  // skip [CLS]
  return bundle_->encoder().HiddenStates(input, {}, layer, positions);
}

std::vector<float> BundleBackend::DoMaskedScores(
    std::span<const TokenId> window_ids, std::size_t masked) {
  const std::size_t one[] = {masked};
  const std::vector<TokenId> input = ModelInput(window_ids, one);
  return bundle_->encoder().MaskedLmLogits(input, {}, masked + 1);
}

BackendFactory BundleBackendFactory(std::shared_ptr<const ModelBundle> bundle) {
  return [bundle]() -> std::unique_ptr<MaskedLmBackend> {
    return std::make_unique<BundleBackend>(bundle);
  };
}

}  // namespace estime
