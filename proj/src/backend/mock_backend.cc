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

#include "estime/mock_backend.h"

#include <cmath>
#include <cstring>
#include <limits>

#include "estime/error.h"
#include "estime/random.h"

namespace estime {
namespace {

constexpr std::string_view kPunctuation =
    "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
constexpr std::string_view kLetters = "abcdefghijklmnopqrstuvwxyz";
constexpr std::string_view kDigits = "0123456789";
constexpr int kMaxChunk = 3;
constexpr int kNumSpecial = 5;

// Number of strings of length 1..kMaxChunk over an alphabet of `a` symbols.
constexpr int BlockSize(int a) { return a + a * a + a * a * a; }

constexpr int kLetterBlock = BlockSize(26);
constexpr int kDigitBlock = BlockSize(10);
constexpr int kPunctBase = kNumSpecial;
constexpr int kLetterStart = kPunctBase + static_cast<int>(kPunctuation.size());
constexpr int kDigitStart = kLetterStart + kLetterBlock;
constexpr int kLetterCont = kDigitStart + kDigitBlock;
constexpr int kDigitCont = kLetterCont + kLetterBlock;
constexpr int kVocabSize = kDigitCont + kDigitBlock;

int ChunkIndex(std::string_view chunk, std::string_view alphabet) {
  const int a = static_cast<int>(alphabet.size());
  int offset = 0;
  int width = a;
  for (std::size_t len = 1; len < chunk.size(); ++len) {
    offset += width;
    width *= a;
  }
  int rank = 0;
  for (char c : chunk) {
    const auto pos = alphabet.find(c);
    if (pos == std::string_view::npos) return -1;
    rank = rank * a + static_cast<int>(pos);
  }
  return offset + rank;
}

std::string ChunkString(int index, std::string_view alphabet) {
  const int a = static_cast<int>(alphabet.size());
  int len = 1;
  int width = a;
  while (index >= width) {
    index -= width;
    width *= a;
    ++len;
  }
  std::string s(len, ' ');
  for (int i = len - 1; i >= 0; --i) {
    s[i] = alphabet[index % a];
    index /= a;
  }
  return s;
}

Vocabulary BuildVocabulary() {
  std::vector<std::string> surfaces = {"[PAD]", "[UNK]", "[CLS]", "[SEP]",
                                       "[MASK]"};
  std::vector<bool> cont(kNumSpecial, false);
  for (char c : kPunctuation) {
    surfaces.emplace_back(1, c);
    cont.push_back(false);
  }
  for (int i = 0; i < kLetterBlock; ++i) {
    surfaces.push_back(ChunkString(i, kLetters));
    cont.push_back(false);
  }
  for (int i = 0; i < kDigitBlock; ++i) {
    surfaces.push_back(ChunkString(i, kDigits));
    cont.push_back(false);
  }
  for (int i = 0; i < kLetterBlock; ++i) {
    surfaces.push_back("##" + ChunkString(i, kLetters));
    cont.push_back(true);
  }
  for (int i = 0; i < kDigitBlock; ++i) {
    surfaces.push_back("##" + ChunkString(i, kDigits));
    cont.push_back(true);
  }
  return Vocabulary(std::move(surfaces), std::move(cont), SpecialTokens{});
}

bool IsAsciiSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsLetter(unsigned char c) { return c >= 'a' && c <= 'z'; }
bool IsDigit(unsigned char c) { return c >= '0' && c <= '9'; }

}  // namespace

MockBackend::MockBackend() : MockBackend(Options{}) {}

MockBackend::MockBackend(Options options)
    : options_(options), vocab_(BuildVocabulary()) {
  if (options_.max_input_tokens < 3 || options_.hidden_layers < 1 ||
      options_.embedding_dim < 1) {
    throw Error(ErrorCode::kConfiguration, "invalid mock backend options");
  }
}

BackendCapabilities MockBackend::capabilities() const {
  BackendCapabilities caps;
  caps.max_input_tokens = options_.max_input_tokens;
  caps.hidden_layers = options_.hidden_layers;
  caps.embedding_dim = options_.embedding_dim;
  return caps;
}

TokenId MockBackend::WordId(std::string_view chunk) const {
  if (chunk.empty() || chunk.size() > kMaxChunk) return -1;
  const int index = ChunkIndex(chunk, kLetters);
  return index < 0 ? -1 : kLetterStart + index;
}

TokenSequence MockBackend::Tokenize(std::string_view text) const {
  std::vector<TokenId> ids;
  std::size_t i = 0;
  bool in_word = false;  // an alphanumeric chunk of the current word was emitted
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (IsAsciiSpace(c)) {
      in_word = false;
      ++i;
    } else if (c >= 0x80) {
      while (i < text.size() && static_cast<unsigned char>(text[i]) >= 0x80) {
        ++i;
      }
      ids.push_back(vocab_.special().unk);
      in_word = false;
    } else if (c < 0x20 || c == 0x7f) {
      ++i;
    } else if (kPunctuation.find(static_cast<char>(c)) !=
               std::string_view::npos) {
      ids.push_back(kPunctBase +
                    static_cast<TokenId>(kPunctuation.find(static_cast<char>(c))));
      in_word = false;
      ++i;
    } else {
      // Letter or digit run.
      const char lowered = static_cast<char>(std::tolower(c));
      const bool letters = IsLetter(static_cast<unsigned char>(lowered));
      std::string run;
      while (i < text.size()) {
        const auto d = static_cast<unsigned char>(std::tolower(
            static_cast<unsigned char>(text[i])));
        if (letters ? !IsLetter(d) : !IsDigit(d)) break;
        run.push_back(static_cast<char>(d));
        ++i;
      }
      const std::string_view alphabet = letters ? kLetters : kDigits;
      for (std::size_t p = 0; p < run.size(); p += kMaxChunk) {
        const int index =
            ChunkIndex(std::string_view(run).substr(p, kMaxChunk), alphabet);
        const TokenId base = in_word ? (letters ? kLetterCont : kDigitCont)
                                     : (letters ? kLetterStart : kDigitStart);
        ids.push_back(base + index);
        in_word = true;
      }
    }
  }
  return MakeTokenSequence(vocab_, std::move(ids));
}

std::string MockBackend::Detokenize(std::span<const TokenId> ids) const {
  std::string out;
  for (TokenId id : ids) {
    const std::string &surface = vocab_.Surface(id);
    if (vocab_.IsContinuation(id)) {
      out.append(surface, 2, std::string::npos);
    } else {
      if (!out.empty()) out.push_back(' ');
      out.append(surface);
    }
  }
  return out;
}

Embedding MockBackend::TokenVector(TokenId id, int dim) {
  Rng rng(SplitMix64(static_cast<std::uint64_t>(id) ^ 0x6d6f636bULL));
  Embedding v(dim);
  double norm = 0.0;
  for (int i = 0; i < dim; i += 2) {
    // Box-Muller; u1 is kept away from zero.
    const double u1 = 1.0 - UniformUnit(rng);
    const double u2 = UniformUnit(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = r * std::cos(2.0 * M_PI * u2);
    const double b = r * std::sin(2.0 * M_PI * u2);
    v[i] = static_cast<float>(a);
    norm += a * a;
    if (i + 1 < dim) {
      v[i + 1] = static_cast<float>(b);
      norm += b * b;
    }
  }
  const double inv = 1.0 / std::sqrt(norm);
  for (float &x : v) x = static_cast<float>(x * inv);
  return v;
}

std::vector<Embedding> MockBackend::DoEmbedMasked(
    std::span<const TokenId> window_ids, std::span<const std::size_t> masked,
    int /*layer*/) {
  std::vector<Embedding> out;
  out.reserve(masked.size());
  for (std::size_t pos : masked) {
    out.push_back(TokenVector(window_ids[pos], options_.embedding_dim));
  }
  return out;
}

std::vector<float> MockBackend::DoMaskedScores(
    std::span<const TokenId> window_ids, std::size_t masked) {
  const TokenId original = window_ids[masked];
  const int v = vocab_.size();
  std::vector<float> scores(v);
  for (TokenId id = 0; id < v; ++id) {
    if (vocab_.IsSpecial(id)) {
      scores[id] = -static_cast<float>(2 * v + id);
    } else if (vocab_.IsContinuation(id)) {
      scores[id] = -static_cast<float>(v + id);
    } else {
      int distance = ((id - original) % v + v) % v;
      if (distance == 0) distance = v;
      scores[id] = -static_cast<float>(distance);
    }
  }
  return scores;
}

static_assert(kVocabSize == 38813);

}  // namespace estime
