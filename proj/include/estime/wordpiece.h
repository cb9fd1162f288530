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

#ifndef ESTIME_WORDPIECE_H_
#define ESTIME_WORDPIECE_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "estime/backend.h"

namespace estime {

// BERT tokenizer: text cleanup, CJK isolation, NFC, optional lower-casing
// with accent stripping, punctuation splitting, then greedy longest-match
// WordPiece over a vocab.txt. Literal special-token strings in the input
// ("[MASK]", ...) are kept as single tokens.
class WordPieceTokenizer {
 public:
  struct Options {
    bool do_lower_case = true;
    bool tokenize_chinese_chars = true;
    int max_chars_per_word = 100;
  };

  WordPieceTokenizer(std::vector<std::string> tokens, SpecialTokens special,
                     Options options);

  // One token per line; ids are line numbers.
  static std::vector<std::string> ReadVocabFile(
      const std::filesystem::path &path);

  const Vocabulary &vocabulary() const { return vocab_; }

  TokenSequence Tokenize(std::string_view text) const;

  // Space-joined surfaces with "##" continuations glued to their word.
  std::string Detokenize(std::span<const TokenId> ids) const;

  // Words after cleanup, normalization and punctuation splitting, before
  // WordPiece.
  std::vector<std::string> BasicTokenize(std::string_view text) const;

 private:
  void AppendWordPieces(const std::string &word,
                        std::vector<TokenId> *ids) const;

  Options options_;
  Vocabulary vocab_;
  std::unordered_map<std::string, TokenId> lookup_;
  std::vector<std::pair<std::string, TokenId>> never_split_;
};

}  // namespace estime

#endif  // ESTIME_WORDPIECE_H_
