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

#include "estime/bert_model.h"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "estime/error.h"

namespace estime {
namespace {

using Matrix = Eigen::MatrixXf;
using Vector = Eigen::RowVectorXf;
using RowMajor =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Linear {
  Matrix weight_t;  // in x out
  Vector bias;

  Matrix operator()(const Matrix &x) const {
    Matrix y = x * weight_t;
    y.rowwise() += bias;
    return y;
  }
};

struct LayerNorm {
  Vector gamma;
  Vector beta;
  float eps = 1e-12f;

  void Apply(Matrix *x) const {
    for (Eigen::Index r = 0; r < x->rows(); ++r) {
      auto row = x->row(r);
      const float mean = row.mean();
      const float var = (row.array() - mean).square().mean();
      const float inv = 1.0f / std::sqrt(var + eps);
      row = ((row.array() - mean) * inv).matrix();
      row = (row.array() * gamma.array() + beta.array()).matrix();
    }
  }
};

struct EncoderLayer {
  Linear query, key, value, attention_out;
  LayerNorm attention_norm;
  Linear intermediate, output;
  LayerNorm output_norm;
};

void Gelu(Matrix *x) {
  *x = x->unaryExpr([](float v) {
    return 0.5f * v * (1.0f + std::erf(v * static_cast<float>(M_SQRT1_2)));
  });
}

const Tensor &Expect(const SafeTensors &w, const std::string &name,
                     std::vector<std::int64_t> shape) {
  const Tensor &t = w.Get(name);
  if (t.shape != shape) {
    std::string got;
    for (std::int64_t d : t.shape) got += std::to_string(d) + " ";
    std::string want;
    for (std::int64_t d : shape) want += std::to_string(d) + " ";
    throw Error(ErrorCode::kSchema, "tensor " + name + " has shape [ " + got +
                                        "], expected [ " + want + "]");
  }
  return t;
}

Vector LoadVector(const SafeTensors &w, const std::string &name,
                  std::int64_t n) {
  const Tensor &t = Expect(w, name, {n});
  return Eigen::Map<const Vector>(t.data.data(), n);
}

RowMajor LoadMatrix(const SafeTensors &w, const std::string &name,
                    std::int64_t rows, std::int64_t cols) {
  const Tensor &t = Expect(w, name, {rows, cols});
  return Eigen::Map<const RowMajor>(t.data.data(), rows, cols);
}

Linear LoadLinear(const SafeTensors &w, const std::string &prefix,
                  std::int64_t in, std::int64_t out) {
  Linear l;
  l.weight_t = LoadMatrix(w, prefix + ".weight", out, in).transpose();
  l.bias = LoadVector(w, prefix + ".bias", out);
  return l;
}

LayerNorm LoadNorm(const SafeTensors &w, const std::string &prefix,
                   std::int64_t n, float eps) {
  LayerNorm norm;
  norm.gamma = LoadVector(w, prefix + ".weight", n);
  norm.beta = LoadVector(w, prefix + ".bias", n);
  norm.eps = eps;
  return norm;
}

}  // namespace

struct BertEncoder::Weights {
  BertArchitecture arch;
  int vocab_size = 0;
  int max_positions = 0;
  RowMajor word_embeddings;  // vocab x hidden
  RowMajor position_embeddings;
  Vector token_type_embedding;  // segment 0
  LayerNorm embedding_norm;
  std::vector<EncoderLayer> layers;
  Linear head_transform;
  LayerNorm head_norm;
  Matrix decoder_t;  // hidden x vocab
  Vector decoder_bias;

  Matrix Run(std::span<const TokenId> ids, std::span<const int> mask,
             int num_layers) const;
};

Matrix BertEncoder::Weights::Run(std::span<const TokenId> ids,
                                 std::span<const int> mask,
                                 int num_layers) const {
  const auto n = static_cast<Eigen::Index>(ids.size());
  if (n == 0 || n > max_positions) {
    throw Error(ErrorCode::kInputSize,
                "model input of " + std::to_string(n) +
                    " tokens outside [1, " + std::to_string(max_positions) +
                    "]");
  }
  if (!mask.empty() && mask.size() != ids.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "attention mask length differs from input length");
  }
  const int hidden = arch.hidden_size;
  Matrix x(n, hidden);
  for (Eigen::Index i = 0; i < n; ++i) {
    const TokenId id = ids[i];
    if (id < 0 || id >= vocab_size) {
      throw Error(ErrorCode::kInvalidArgument,
                  "token id " + std::to_string(id) + " outside vocabulary");
    }
    x.row(i) = word_embeddings.row(id) + position_embeddings.row(i) +
               token_type_embedding;
  }
  embedding_norm.Apply(&x);

  // Additive key mask: padded keys get the most negative float, as the
  // reference implementation does.
  Vector key_bias = Vector::Zero(n);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(mask.size()); ++i) {
    if (mask[i] == 0) key_bias[i] = std::numeric_limits<float>::lowest();
  }

  const int heads = arch.num_heads;
  const int head_dim = hidden / heads;
  const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));
  for (int l = 0; l < num_layers; ++l) {
    const EncoderLayer &layer = layers[l];
    const Matrix q = layer.query(x);
    const Matrix k = layer.key(x);
    const Matrix v = layer.value(x);
    Matrix context(n, hidden);
    for (int h = 0; h < heads; ++h) {
      const auto qh = q.middleCols(h * head_dim, head_dim);
      const auto kh = k.middleCols(h * head_dim, head_dim);
      const auto vh = v.middleCols(h * head_dim, head_dim);
      Matrix scores = (qh * kh.transpose()) * scale;
      scores.rowwise() += key_bias;
      for (Eigen::Index r = 0; r < n; ++r) {
        auto row = scores.row(r);
        const float top = row.maxCoeff();
        row = (row.array() - top).exp().matrix();
        row /= row.sum();
      }
      context.middleCols(h * head_dim, head_dim) = scores * vh;
    }
    Matrix attended = layer.attention_out(context) + x;
    layer.attention_norm.Apply(&attended);
    Matrix inner = layer.intermediate(attended);
    Gelu(&inner);
    x = layer.output(inner) + attended;
    layer.output_norm.Apply(&x);
  }
  return x;
}

BertEncoder::BertEncoder(std::shared_ptr<const Weights> weights)
    : weights_(std::move(weights)) {}

BertEncoder BertEncoder::FromSafeTensors(const SafeTensors &w,
                                         const BertArchitecture &arch) {
  if (arch.hidden_layers < 1 || arch.num_heads < 1 || arch.hidden_size < 1 ||
      arch.hidden_size % arch.num_heads != 0 || arch.intermediate_size < 1) {
    throw Error(ErrorCode::kSchema, "invalid BERT architecture");
  }
  auto weights = std::make_shared<Weights>();
  weights->arch = arch;
  const std::int64_t hidden = arch.hidden_size;
  const std::string emb = "bert.embeddings.";

  const Tensor &words = w.Get(emb + "word_embeddings.weight");
  if (words.shape.size() != 2 || words.shape[1] != hidden) {
    throw Error(ErrorCode::kSchema,
                "word embeddings do not match hidden size " +
                    std::to_string(hidden));
  }
  const std::int64_t vocab = words.shape[0];
  weights->vocab_size = static_cast<int>(vocab);
  weights->word_embeddings = LoadMatrix(w, emb + "word_embeddings.weight",
                                        vocab, hidden);
  const Tensor &positions = w.Get(emb + "position_embeddings.weight");
  if (positions.shape.size() != 2) {
    throw Error(ErrorCode::kSchema, "position embeddings are not a matrix");
  }
  weights->max_positions = static_cast<int>(positions.shape[0]);
  weights->position_embeddings = LoadMatrix(
      w, emb + "position_embeddings.weight", positions.shape[0], hidden);
  const Tensor &types = w.Get(emb + "token_type_embeddings.weight");
  if (types.shape.size() != 2 || types.shape[1] != hidden ||
      types.shape[0] < 1) {
    throw Error(ErrorCode::kSchema, "bad token type embeddings");
  }
  weights->token_type_embedding =
      Eigen::Map<const Vector>(types.data.data(), hidden);
  weights->embedding_norm =
      LoadNorm(w, emb + "LayerNorm", hidden, arch.layer_norm_eps);

  const std::int64_t inner = arch.intermediate_size;
  for (int l = 0; l < arch.hidden_layers; ++l) {
    const std::string p = "bert.encoder.layer." + std::to_string(l) + ".";
    EncoderLayer layer;
    layer.query = LoadLinear(w, p + "attention.self.query", hidden, hidden);
    layer.key = LoadLinear(w, p + "attention.self.key", hidden, hidden);
    layer.value = LoadLinear(w, p + "attention.self.value", hidden, hidden);
    layer.attention_out =
        LoadLinear(w, p + "attention.output.dense", hidden, hidden);
    layer.attention_norm = LoadNorm(w, p + "attention.output.LayerNorm",
                                    hidden, arch.layer_norm_eps);
    layer.intermediate = LoadLinear(w, p + "intermediate.dense", hidden, inner);
    layer.output = LoadLinear(w, p + "output.dense", inner, hidden);
    layer.output_norm =
        LoadNorm(w, p + "output.LayerNorm", hidden, arch.layer_norm_eps);
    weights->layers.push_back(std::move(layer));
  }
  if (w.Contains("bert.encoder.layer." + std::to_string(arch.hidden_layers) +
                 ".output.dense.weight")) {
    throw Error(ErrorCode::kSchema,
                "graph has more encoder layers than the declared " +
                    std::to_string(arch.hidden_layers));
  }

  weights->head_transform =
      LoadLinear(w, "cls.predictions.transform.dense", hidden, hidden);
  weights->head_norm = LoadNorm(w, "cls.predictions.transform.LayerNorm",
                                hidden, arch.layer_norm_eps);
  if (w.Contains("cls.predictions.decoder.weight")) {
    weights->decoder_t =
        LoadMatrix(w, "cls.predictions.decoder.weight", vocab, hidden)
            .transpose();
  } else {
    weights->decoder_t = weights->word_embeddings.transpose();
  }
  weights->decoder_bias = LoadVector(
      w,
      w.Contains("cls.predictions.bias") ? "cls.predictions.bias"
                                         : "cls.predictions.decoder.bias",
      vocab);
  return BertEncoder(std::move(weights));
}

const BertArchitecture &BertEncoder::architecture() const {
  return weights_->arch;
}

int BertEncoder::vocab_size() const { return weights_->vocab_size; }

int BertEncoder::max_positions() const { return weights_->max_positions; }

std::vector<Embedding> BertEncoder::HiddenStates(
    std::span<const TokenId> input_ids, std::span<const int> attention_mask,
    int layer, std::span<const std::size_t> positions) const {
  if (layer < 0 || layer > weights_->arch.hidden_layers) {
    throw Error(ErrorCode::kConfiguration,
                "layer " + std::to_string(layer) + " outside [0, " +
                    std::to_string(weights_->arch.hidden_layers) + "]");
  }
  const Matrix states = weights_->Run(input_ids, attention_mask, layer);
  std::vector<Embedding> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) {
    if (p >= input_ids.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "position " + std::to_string(p) + " outside model input");
    }
    const auto row = states.row(static_cast<Eigen::Index>(p));
    out.emplace_back(static_cast<std::size_t>(row.size()));
    for (Eigen::Index j = 0; j < row.size(); ++j) out.back()[j] = row[j];
  }
  return out;
}

std::vector<float> BertEncoder::MaskedLmLogits(
    std::span<const TokenId> input_ids, std::span<const int> attention_mask,
    std::size_t position) const {
  if (position >= input_ids.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "position " + std::to_string(position) +
                    " outside model input");
  }
  const Matrix states = weights_->Run(input_ids, attention_mask,
                                      weights_->arch.hidden_layers);
  Matrix h = states.row(static_cast<Eigen::Index>(position));
  h = weights_->head_transform(h);
  Gelu(&h);
  weights_->head_norm.Apply(&h);
  const Vector logits = h * weights_->decoder_t + weights_->decoder_bias;
  return std::vector<float>(logits.data(), logits.data() + logits.size());
}

}  // namespace estime
