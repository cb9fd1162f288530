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

#ifndef ESTIME_STATS_H_
#define ESTIME_STATS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace estime {

struct ScoreVector {
  std::vector<double> values;
  std::vector<std::string> labels;  // empty or same length as values
};

// Permutation test settings. Samples of at most `exact_max_n` items are
// tested by enumerating all n! pairings; larger ones draw `permutations`
// seeded shuffles of the second argument.
struct PermutationOptions {
  int permutations = 10000;
  std::uint64_t seed = 0;
  std::size_t exact_max_n = 8;
};

struct Correlation {
  double value = 0.0;
  double p_value = 1.0;
};

struct CorrelationReport {
  double rho = 0.0;
  double rho_p = 1.0;
  double tau_c = 0.0;
  double tau_p = 1.0;
  std::size_t n = 0;
};

// 1-based ranks with ties sharing the average of their positions.
std::vector<double> AverageRanks(std::span<const double> values);

// Spearman's rho: Pearson correlation of the average-rank vectors. Two-sided
// permutation p-value counting pairings with |rho| >= |observed|.
// Throws kDegenerateInput when either side is constant.
Correlation Spearman(std::span<const double> x, std::span<const double> y,
                     const PermutationOptions &options = {});

// Stuart's tau-c = 2m(C - D) / (n^2 (m - 1)), m the smaller number of
// distinct values on either side. Throws kDegenerateInput when m < 2.
Correlation KendallTauC(std::span<const double> x, std::span<const double> y,
                        const PermutationOptions &options = {});

// Both statistics with their p-values.
CorrelationReport Correlate(std::span<const double> x,
                            std::span<const double> y,
                            const PermutationOptions &options = {});

// C - D over all n(n-1)/2 pairs, ties in either coordinate counting as
// neither. O(n log n).
std::int64_t ConcordanceBalance(std::span<const double> x,
                                std::span<const double> y);

struct SystemScore {
  std::string system;
  std::string text_id;
  double value = 0.0;
};

// Per-system mean over texts, ordered by system id (labels hold the ids).
// Every (system, text) cell must appear exactly once; otherwise throws
// kIncompleteGrid listing the offending cells.
ScoreVector SystemLevel(std::span<const SystemScore> scores);

// Mean of one pair's expert annotations (each in 1..5).
double AverageExpertScores(std::span<const int> annotations);

}  // namespace estime

#endif  // ESTIME_STATS_H_
