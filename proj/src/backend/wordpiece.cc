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

#include "estime/wordpiece.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>

#include "estime/error.h"

namespace estime {
namespace {

bool IsWhitespace(UChar32 c) {
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r') return true;
  return u_charType(c) == U_SPACE_SEPARATOR;
}

bool IsControl(UChar32 c) {
  if (c == '\t' || c == '\n' || c == '\r') return false;
  switch (u_charType(c)) {
    case U_CONTROL_CHAR:
    case U_FORMAT_CHAR:
    case U_PRIVATE_USE_CHAR:
    case U_SURROGATE:
    case U_UNASSIGNED:
      return true;
    default:
      return false;
  }
}

bool IsPunctuation(UChar32 c) {
  if ((c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
      (c >= 123 && c <= 126)) {
    return true;
  }
  switch (u_charType(c)) {
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_CONNECTOR_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
      return true;
    default:
      return false;
  }
}

bool IsChineseChar(UChar32 c) {
  return (c >= 0x4E00 && c <= 0x9FFF) || (c >= 0x3400 && c <= 0x4DBF) ||
         (c >= 0x20000 && c <= 0x2A6DF) || (c >= 0x2A700 && c <= 0x2B73F) ||
         (c >= 0x2B740 && c <= 0x2B81F) || (c >= 0x2B820 && c <= 0x2CEAF) ||
         (c >= 0xF900 && c <= 0xFAFF) || (c >= 0x2F800 && c <= 0x2FA1F);
}

// Separators for the final whitespace split (what str.split() breaks on).
bool IsSplitSpace(UChar32 c) {
  if (c == ' ' || (c >= 0x09 && c <= 0x0D) || (c >= 0x1C && c <= 0x1F) ||
      c == 0x85) {
    return true;
  }
  const int8_t type = u_charType(c);
  return type == U_SPACE_SEPARATOR || type == U_LINE_SEPARATOR ||
         type == U_PARAGRAPH_SEPARATOR;
}

std::string ToUtf8(const icu::UnicodeString &s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

const icu::Normalizer2 &Normalizer(bool decompose) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *n = decompose
                                  ? icu::Normalizer2::getNFDInstance(status)
                                  : icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) {
    throw Error(ErrorCode::kConfiguration, "ICU normalizer unavailable");
  }
  return *n;
}

icu::UnicodeString Normalize(const icu::UnicodeString &s, bool decompose) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = Normalizer(decompose).normalize(s, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidArgument, "Unicode normalization failed");
  }
  return out;
}

template <typename Fn>
void ForEachCodePoint(const icu::UnicodeString &s, Fn fn) {
  for (int32_t i = 0; i < s.length();) {
    const UChar32 c = s.char32At(i);
    fn(c);
    i += U16_LENGTH(c);
  }
}

}  // namespace

WordPieceTokenizer::WordPieceTokenizer(std::vector<std::string> tokens,
                                       SpecialTokens special, Options options)
    : options_(options) {
  std::vector<bool> continuation(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    continuation[i] = tokens[i].starts_with("##");
  }
  for (TokenId id : {special.pad, special.unk, special.cls, special.sep,
                     special.mask}) {
    if (id >= 0 && static_cast<std::size_t>(id) < tokens.size()) {
      continuation[id] = false;
    }
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    lookup_[tokens[i]] = static_cast<TokenId>(i);
  }
  vocab_ = Vocabulary(std::move(tokens), std::move(continuation), special);
  for (TokenId id : vocab_.special_ids()) {
    never_split_.emplace_back(vocab_.Surface(id), id);
  }
  // Longest first so that overlapping literals resolve to the longer one.
  std::sort(never_split_.begin(), never_split_.end(),
            [](const auto &a, const auto &b) {
              return a.first.size() > b.first.size();
            });
}

std::vector<std::string> WordPieceTokenizer::ReadVocabFile(
    const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open vocabulary " + path.string());
  }
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  if (tokens.empty()) {
    throw Error(ErrorCode::kSchema, "vocabulary " + path.string() +
                                        " is empty");
  }
  return tokens;
}

std::vector<std::string> WordPieceTokenizer::BasicTokenize(
    std::string_view text) const {
  const icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));

  icu::UnicodeString cleaned;
  ForEachCodePoint(input, [&](UChar32 c) {
    if (c == 0 || c == 0xFFFD || IsControl(c)) return;
    if (IsWhitespace(c)) {
      cleaned.append(UChar32{' '});
    } else if (options_.tokenize_chinese_chars && IsChineseChar(c)) {
      cleaned.append(UChar32{' '}).append(c).append(UChar32{' '});
    } else {
      cleaned.append(c);
    }
  });
  const icu::UnicodeString composed = Normalize(cleaned, /*decompose=*/false);

  std::vector<std::string> out;
  icu::UnicodeString word;
  auto flush_word = [&]() {
    if (word.isEmpty()) return;
    icu::UnicodeString w = word;
    word.remove();
    if (options_.do_lower_case) {
      w.toLower(icu::Locale::getRoot());
      const icu::UnicodeString decomposed = Normalize(w, /*decompose=*/true);
      w.remove();
      ForEachCodePoint(decomposed, [&](UChar32 c) {
        if (u_charType(c) != U_NON_SPACING_MARK) w.append(c);
      });
    }
    icu::UnicodeString piece;
    ForEachCodePoint(w, [&](UChar32 c) {
      if (IsPunctuation(c)) {
        if (!piece.isEmpty()) out.push_back(ToUtf8(piece));
        piece.remove();
        out.push_back(ToUtf8(icu::UnicodeString(c)));
      } else {
        piece.append(c);
      }
    });
    if (!piece.isEmpty()) out.push_back(ToUtf8(piece));
  };
  ForEachCodePoint(composed, [&](UChar32 c) {
    if (IsSplitSpace(c)) {
      flush_word();
    } else {
      word.append(c);
    }
  });
  flush_word();
  return out;
}

void WordPieceTokenizer::AppendWordPieces(const std::string &word,
                                          std::vector<TokenId> *ids) const {
  const TokenId unk = vocab_.special().unk;
  // Code point boundaries, so that pieces never split a UTF-8 sequence.
  std::vector<std::size_t> bounds;
  for (std::size_t i = 0; i < word.size();) {
    bounds.push_back(i);
    UChar32 c;
    int32_t next = static_cast<int32_t>(i);
    U8_NEXT(word.data(), next, static_cast<int32_t>(word.size()), c);
    i = static_cast<std::size_t>(next);
  }
  bounds.push_back(word.size());
  const std::size_t num_chars = bounds.size() - 1;
  if (num_chars > static_cast<std::size_t>(options_.max_chars_per_word)) {
    ids->push_back(unk);
    return;
  }

  std::vector<TokenId> pieces;
  std::size_t start = 0;
  while (start < num_chars) {
    std::size_t end = num_chars;
    TokenId found = -1;
    while (start < end) {
      std::string candidate =
          word.substr(bounds[start], bounds[end] - bounds[start]);
      if (start > 0) candidate.insert(0, "##");
      const auto it = lookup_.find(candidate);
      if (it != lookup_.end()) {
        found = it->second;
        break;
      }
      --end;
    }
    if (found < 0) {
      ids->push_back(unk);
      return;
    }
    pieces.push_back(found);
    start = end;
  }
  ids->insert(ids->end(), pieces.begin(), pieces.end());
}

TokenSequence WordPieceTokenizer::Tokenize(std::string_view text) const {
  std::vector<TokenId> ids;
  auto tokenize_segment = [&](std::string_view segment) {
    for (const std::string &word : BasicTokenize(segment)) {
      AppendWordPieces(word, &ids);
    }
  };
  std::size_t pos = 0;
  std::size_t segment_start = 0;
  while (pos < text.size()) {
    bool matched = false;
    for (const auto &[literal, id] : never_split_) {
      if (!literal.empty() && text.substr(pos).starts_with(literal)) {
        tokenize_segment(text.substr(segment_start, pos - segment_start));
        ids.push_back(id);
        pos += literal.size();
        segment_start = pos;
        matched = true;
        break;
      }
    }
    if (!matched) ++pos;
  }
  tokenize_segment(text.substr(segment_start));
  return MakeTokenSequence(vocab_, std::move(ids));
}

std::string WordPieceTokenizer::Detokenize(std::span<const TokenId> ids) const {
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

}  // namespace estime
