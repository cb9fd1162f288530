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

#include "estime/scorer.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "estime/error.h"

namespace estime {
namespace {

void CheckPlanParameters(const EstimeConfig &config) {
  if (config.window < 1) {
    throw Error(ErrorCode::kConfiguration, "window must be positive");
  }
  if (config.stride < 1 || config.stride > config.window) {
    throw Error(ErrorCode::kConfiguration,
                "stride must lie in [1, window], got " +
                    std::to_string(config.stride));
  }
  if (config.margin < 0 || config.margin >= config.window) {
    throw Error(ErrorCode::kConfiguration,
                "margin must lie in [0, window), got " +
                    std::to_string(config.margin));
  }
}

std::string PassLabel(std::size_t index, const MaskingPass &pass) {
  return "pass " + std::to_string(index) + " (window [" +
         std::to_string(pass.window.begin) + ", " +
         std::to_string(pass.window.end) + "))";
}

}  // namespace

void ValidateConfig(const EstimeConfig &config,
                    const BackendCapabilities &caps) {
  CheckPlanParameters(config);
  if (config.layer < 1 || config.layer > caps.hidden_layers) {
    throw Error(ErrorCode::kConfiguration,
                "layer " + std::to_string(config.layer) +
                    " outside the model's hidden layers [1, " +
                    std::to_string(caps.hidden_layers) + "]");
  }
  if (config.window > caps.max_window()) {
    throw Error(ErrorCode::kConfiguration,
                "window " + std::to_string(config.window) + " plus " +
                    std::to_string(caps.num_delimiters) +
                    " delimiters exceeds model input limit " +
                    std::to_string(caps.max_input_tokens));
  }
}

MaskingPlan PlanMasking(std::size_t n, const EstimeConfig &config) {
  CheckPlanParameters(config);
  const auto window = static_cast<std::size_t>(config.window);
  const auto stride = static_cast<std::size_t>(config.stride);
  const auto margin = static_cast<std::size_t>(config.margin);

  MaskingPlan plan;
  std::vector<bool> taken(n, false);
  std::size_t anchor = 0;
  while (anchor < n) {
    MaskingPass pass;
    pass.window.begin = anchor > margin ? anchor - margin : 0;
    pass.window.end = std::min(n, pass.window.begin + window);
    for (std::size_t p = anchor; p < pass.window.end; p += stride) {
      if (taken[p]) continue;
      taken[p] = true;
      pass.mask_positions.push_back(p);
    }
    plan.passes.push_back(std::move(pass));
    while (anchor < n && taken[anchor]) ++anchor;
  }
  return plan;
}

EmbeddingTable CollectEmbeddings(const TokenSequence &tokens,
                                 const MaskingPlan &plan,
                                 const EstimeConfig &config,
                                 MaskedLmBackend &backend) {
  const BackendCapabilities caps = backend.capabilities();
  ValidateConfig(config, caps);
  EmbeddingTable table;
  table.vectors.resize(tokens.size());
  std::vector<bool> filled(tokens.size(), false);
  for (std::size_t i = 0; i < plan.passes.size(); ++i) {
    const MaskingPass &pass = plan.passes[i];
    if (pass.window.end > tokens.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  PassLabel(i, pass) + " exceeds sequence of length " +
                      std::to_string(tokens.size()));
    }
    std::vector<Embedding> vectors;
    try {
      vectors = backend.EmbedMasked(tokens, pass.window, pass.mask_positions,
                                    config.layer);
    } catch (const Error &e) {
      throw Error(e.code(), PassLabel(i, pass) + ": " + e.what());
    }
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      const std::size_t pos = pass.mask_positions[k];
      table.vectors[pos] = std::move(vectors[k]);
      filled[pos] = true;
    }
  }
  const auto missing = std::find(filled.begin(), filled.end(), false);
  if (missing != filled.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "masking plan leaves token " +
                    std::to_string(missing - filled.begin()) +
                    " without an embedding");
  }
  return table;
}

double Similarity(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0;
  const std::size_t d = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < d; ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return dot;
}

std::size_t BestMatch(std::span<const float> query,
                      const EmbeddingTable &table) {
  std::size_t best = 0;
  double best_sim = Similarity(query, table.vectors.at(0));
  for (std::size_t t = 1; t < table.size(); ++t) {
    const double sim = Similarity(query, table.vectors[t]);
    if (sim > best_sim) {
      best_sim = sim;
      best = t;
    }
  }
  return best;
}

std::vector<std::size_t> CheckedPositions(const TokenSequence &summary,
                                          const TokenSequence &text,
                                          const EstimeConfig &config) {
  std::unordered_set<TokenId> text_ids;
  if (config.filter_to_text_tokens) {
    text_ids.insert(text.ids.begin(), text.ids.end());
  }
  std::vector<std::size_t> checked;
  for (std::size_t i = 0; i < summary.size(); ++i) {
    if (!config.include_continuation_tokens && !summary.word_start[i]) {
      continue;
    }
    if (config.filter_to_text_tokens && !text_ids.contains(summary.ids[i])) {
      continue;
    }
    checked.push_back(i);
  }
  return checked;
}

EstimeResult MatchAndCount(const TokenSequence &summary_tokens,
                           const EmbeddingTable &summary_table,
                           const TokenSequence &text_tokens,
                           const EmbeddingTable &text_table,
                           const EstimeConfig &config) {
  if (summary_table.size() != summary_tokens.size() ||
      text_table.size() != text_tokens.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding table does not match its token sequence");
  }
  const std::vector<std::size_t> checked =
      CheckedPositions(summary_tokens, text_tokens, config);
  EstimeResult result;
  if (checked.empty()) return result;
  if (text_tokens.empty()) {
    throw Error(ErrorCode::kEmptyText,
                "text has no tokens but " + std::to_string(checked.size()) +
                    " summary tokens need a match");
  }
  for (std::size_t s : checked) {
    const Embedding &query = summary_table.vectors[s];
    const std::size_t t = BestMatch(query, text_table);
    TokenMatch match;
    match.summary_pos = s;
    match.text_pos = t;
    match.summary_token = summary_tokens.ids[s];
    match.text_token = text_tokens.ids[t];
    match.similarity = Similarity(query, text_table.vectors[t]);
    if (match.summary_token != match.text_token) ++result.num_inconsistencies;
    result.matches.push_back(match);
  }
  result.num_checked = static_cast<int>(checked.size());
  return result;
}

Scorer::Scorer(MaskedLmBackend &backend, EstimeConfig config,
               std::size_t text_cache_size)
    : backend_(backend), config_(config), cache_size_(text_cache_size) {
  ValidateConfig(config_, backend_.capabilities());
}

const Scorer::CachedText &Scorer::Text(std::string_view text) {
  for (auto it = cache_.begin(); it != cache_.end(); ++it) {
    if (it->text == text) {
      cache_.splice(cache_.begin(), cache_, it);
      return cache_.front();
    }
  }
  CachedText entry;
  entry.text = std::string(text);
  entry.tokens = backend_.Tokenize(text);
  entry.table = CollectEmbeddings(
      entry.tokens, PlanMasking(entry.tokens.size(), config_), config_,
      backend_);
  cache_.push_front(std::move(entry));
  if (cache_.size() > std::max<std::size_t>(cache_size_, 1)) cache_.pop_back();
  return cache_.front();
}

EstimeResult Scorer::Score(std::string_view text, std::string_view summary) {
  const TokenSequence summary_tokens = backend_.Tokenize(summary);
  const TokenSequence text_tokens = backend_.Tokenize(text);
  // Nothing to match: skip the forward passes altogether.
  if (CheckedPositions(summary_tokens, text_tokens, config_).empty()) {
    return {};
  }
  if (text_tokens.empty()) {
    throw Error(ErrorCode::kEmptyText,
                "text has no tokens but the summary has tokens to check");
  }
  const CachedText &cached = Text(text);
  const EmbeddingTable summary_table = CollectEmbeddings(
      summary_tokens, PlanMasking(summary_tokens.size(), config_), config_,
      backend_);
  EstimeResult result = MatchAndCount(summary_tokens, summary_table,
                                      cached.tokens, cached.table, config_);
  if (cache_size_ == 0) cache_.clear();
  return result;
}

EstimeResult Estime(std::string_view text, std::string_view summary,
                    const EstimeConfig &config, MaskedLmBackend &backend) {
  Scorer scorer(backend, config, 0);
  return scorer.Score(text, summary);
}

std::vector<ScoreOutcome> ScoreBatch(
    std::span<const TextSummary> items, const EstimeConfig &config,
    const BackendFactory &factory, int workers,
    const std::function<void(std::size_t, const ScoreOutcome &)> &on_done) {
  if (workers < 1) {
    throw Error(ErrorCode::kConfiguration, "worker count must be positive");
  }
  std::vector<ScoreOutcome> outcomes(items.size());
  if (items.empty()) return outcomes;
  const auto num_workers = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(workers), items.size()));

  std::atomic<std::size_t> next{0};
  std::mutex done_mutex;
  auto work = [&](Scorer &scorer) {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      ScoreOutcome outcome;
      try {
        outcome.result = scorer.Score(items[i].text, items[i].summary);
      } catch (const std::exception &e) {
        outcome.error = e.what();
      }
      std::lock_guard<std::mutex> lock(done_mutex);
      outcomes[i] = outcome;
      if (on_done) on_done(i, outcomes[i]);
    }
  };

  if (num_workers == 1) {
    std::unique_ptr<MaskedLmBackend> backend = factory();
    Scorer scorer(*backend, config);
    work(scorer);
    return outcomes;
  }

  // Backends and scorers are built up front so configuration errors surface
  // before any work starts.
  std::vector<std::unique_ptr<MaskedLmBackend>> backends;
  std::vector<Scorer> scorers;
  backends.reserve(num_workers);
  scorers.reserve(num_workers);
  for (int w = 0; w < num_workers; ++w) {
    backends.push_back(factory());
    scorers.emplace_back(*backends.back(), config);
  }
  std::vector<std::thread> threads;
  for (int w = 0; w < num_workers; ++w) {
    threads.emplace_back([&, w] { work(scorers[w]); });
  }
  for (std::thread &t : threads) t.join();
  return outcomes;
}

}  // namespace estime
