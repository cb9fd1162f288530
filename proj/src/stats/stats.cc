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

#include "estime/stats.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "estime/error.h"
#include "estime/random.h"

namespace estime {
namespace {

void CheckPair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "score vectors differ in length (" + std::to_string(x.size()) +
                    " vs " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "correlation needs at least 2 items, got " +
                    std::to_string(x.size()));
  }
  for (std::span<const double> side : {x, y}) {
    for (double v : side) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument, "score is not finite");
      }
    }
  }
}

// Dense ranks 0..k-1 (equal values share a rank).
std::vector<std::uint32_t> DenseRanks(std::span<const double> values,
                                      std::size_t *num_distinct) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<std::uint32_t> ranks(values.size());
  std::uint32_t rank = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && values[order[i]] != values[order[i - 1]]) ++rank;
    ranks[order[i]] = rank;
  }
  *num_distinct = values.empty() ? 0 : rank + 1;
  return ranks;
}

std::int64_t TiedPairs(std::span<const std::uint32_t> ranks,
                       std::size_t num_distinct) {
  std::vector<std::int64_t> counts(num_distinct, 0);
  for (std::uint32_t r : ranks) ++counts[r];
  std::int64_t ties = 0;
  for (std::int64_t c : counts) ties += c * (c - 1) / 2;
  return ties;
}

// Knight's algorithm over dense ranks. `x_ties` and `y_ties` are the tied
// pair counts of each side, which do not depend on the pairing.
class BalanceCounter {
 public:
  BalanceCounter(std::span<const std::uint32_t> xr, std::size_t y_distinct,
                 std::int64_t x_ties, std::int64_t y_ties)
      : xr_(xr.begin(), xr.end()),
        y_distinct_(y_distinct),
        x_ties_(x_ties),
        y_ties_(y_ties),
        keys_(xr.size()),
        tree_(y_distinct + 1) {}

  std::int64_t operator()(std::span<const std::uint32_t> yr) {
    const auto n = static_cast<std::int64_t>(xr_.size());
    for (std::size_t i = 0; i < xr_.size(); ++i) {
      keys_[i] = (static_cast<std::uint64_t>(xr_[i]) << 32) | yr[i];
    }
    std::sort(keys_.begin(), keys_.end());

    std::int64_t joint_ties = 0;
    std::int64_t run = 1;
    for (std::size_t i = 1; i <= keys_.size(); ++i) {
      if (i < keys_.size() && keys_[i] == keys_[i - 1]) {
        ++run;
      } else {
        joint_ties += run * (run - 1) / 2;
        run = 1;
      }
    }

    // Discordant pairs: earlier elements (smaller x, or equal x and smaller
    // or equal y) with strictly larger y.
    std::fill(tree_.begin(), tree_.end(), 0);
    std::int64_t discordant = 0;
    for (std::size_t i = 0; i < keys_.size(); ++i) {
      const auto y = static_cast<std::uint32_t>(keys_[i] & 0xffffffffULL);
      discordant += static_cast<std::int64_t>(i) - Prefix(y + 1);
      Add(y + 1);
    }
    const std::int64_t total = n * (n - 1) / 2;
    return total - x_ties_ - y_ties_ + joint_ties - 2 * discordant;
  }

 private:
  std::int64_t Prefix(std::size_t i) const {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }
  void Add(std::size_t i) {
    for (; i <= y_distinct_; i += i & (~i + 1)) ++tree_[i];
  }

  std::vector<std::uint32_t> xr_;
  std::size_t y_distinct_;
  std::int64_t x_ties_;
  std::int64_t y_ties_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::int64_t> tree_;
};

std::size_t Factorial(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

// Two-sided permutation p-value. `statistic` maps a permuted copy of the
// second argument to an exactly comparable value (an integer held in int64).
template <typename T, typename Statistic>
double PermutationPValue(std::span<const T> second, std::int64_t observed,
                         const PermutationOptions &options,
                         Statistic statistic) {
  const std::int64_t threshold = observed < 0 ? -observed : observed;
  const std::size_t n = second.size();
  std::vector<T> permuted(second.begin(), second.end());
  auto extreme = [&]() {
    const std::int64_t s = statistic(std::span<const T>(permuted));
    return (s < 0 ? -s : s) >= threshold;
  };

  if (n <= options.exact_max_n) {
    std::vector<std::size_t> index(n);
    std::iota(index.begin(), index.end(), std::size_t{0});
    std::size_t hits = 0;
    do {
      for (std::size_t i = 0; i < n; ++i) permuted[i] = second[index[i]];
      if (extreme()) ++hits;
    } while (std::next_permutation(index.begin(), index.end()));
    return static_cast<double>(hits) / static_cast<double>(Factorial(n));
  }

  if (options.permutations < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "permutation count must be positive");
  }
  Rng rng(options.seed);
  std::size_t hits = 0;
  for (int p = 0; p < options.permutations; ++p) {
    Shuffle(std::span<T>(permuted), rng);
    if (extreme()) ++hits;
  }
  // The observed pairing counts as one of the equally likely outcomes.
  return static_cast<double>(hits + 1) /
         static_cast<double>(options.permutations + 1);
}

// Ranks doubled so that average ranks are integers.
std::vector<std::int64_t> DoubledRanks(std::span<const double> values) {
  const std::vector<double> ranks = AverageRanks(values);
  std::vector<std::int64_t> doubled(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    doubled[i] = static_cast<std::int64_t>(std::llround(2.0 * ranks[i]));
  }
  return doubled;
}

}  // namespace

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank ((i+1) + j) / 2.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

Correlation Spearman(std::span<const double> x, std::span<const double> y,
                     const PermutationOptions &options) {
  CheckPair(x, y);
  const auto n = static_cast<std::int64_t>(x.size());
  const std::vector<std::int64_t> rx = DoubledRanks(x);
  const std::vector<std::int64_t> ry = DoubledRanks(y);
  // With doubled ranks R, sum((r - mean)(s - mean)) * 4 = sum(R S) - n(n+1)^2.
  const std::int64_t centre = n * (n + 1) * (n + 1);
  auto cross = [&](std::span<const std::int64_t> other) {
    std::int64_t s = 0;
    for (std::int64_t i = 0; i < n; ++i) s += rx[i] * other[i];
    return s - centre;
  };
  std::int64_t sxx = -centre;
  std::int64_t syy = -centre;
  for (std::int64_t i = 0; i < n; ++i) {
    sxx += rx[i] * rx[i];
    syy += ry[i] * ry[i];
  }
  if (sxx == 0 || syy == 0) {
    throw Error(ErrorCode::kDegenerateInput,
                "Spearman correlation undefined for a constant score vector");
  }
  const std::int64_t observed = cross(ry);
  Correlation out;
  out.value = static_cast<double>(observed) /
              std::sqrt(static_cast<double>(sxx) * static_cast<double>(syy));
  out.p_value = PermutationPValue<std::int64_t>(ry, observed, options, cross);
  return out;
}

std::int64_t ConcordanceBalance(std::span<const double> x,
                                std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "score vectors differ in length");
  }
  std::size_t kx = 0;
  std::size_t ky = 0;
  const std::vector<std::uint32_t> xr = DenseRanks(x, &kx);
  const std::vector<std::uint32_t> yr = DenseRanks(y, &ky);
  BalanceCounter balance(xr, ky, TiedPairs(xr, kx), TiedPairs(yr, ky));
  return balance(yr);
}

Correlation KendallTauC(std::span<const double> x, std::span<const double> y,
                        const PermutationOptions &options) {
  CheckPair(x, y);
  std::size_t kx = 0;
  std::size_t ky = 0;
  const std::vector<std::uint32_t> xr = DenseRanks(x, &kx);
  const std::vector<std::uint32_t> yr = DenseRanks(y, &ky);
  const std::size_t m = std::min(kx, ky);
  if (m < 2) {
    throw Error(ErrorCode::kDegenerateInput,
                "tau-c undefined: a score vector has fewer than 2 distinct "
                "values");
  }
  BalanceCounter balance(xr, ky, TiedPairs(xr, kx), TiedPairs(yr, ky));
  const std::int64_t s = balance(yr);
  const auto n = static_cast<double>(x.size());
  Correlation out;
  out.value = 2.0 * static_cast<double>(m) * static_cast<double>(s) /
              (n * n * static_cast<double>(m - 1));
  out.p_value = PermutationPValue<std::uint32_t>(
      yr, s, options,
      [&](std::span<const std::uint32_t> perm) { return balance(perm); });
  return out;
}

CorrelationReport Correlate(std::span<const double> x,
                            std::span<const double> y,
                            const PermutationOptions &options) {
  const Correlation rho = Spearman(x, y, options);
  const Correlation tau = KendallTauC(x, y, options);
  CorrelationReport report;
  report.rho = rho.value;
  report.rho_p = rho.p_value;
  report.tau_c = tau.value;
  report.tau_p = tau.p_value;
  report.n = x.size();
  return report;
}

ScoreVector SystemLevel(std::span<const SystemScore> scores) {
  std::set<std::string> texts;
  std::map<std::string, std::map<std::string, double>> grid;
  std::vector<std::string> problems;
  for (const SystemScore &s : scores) {
    if (!std::isfinite(s.value)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "score for (" + s.system + ", " + s.text_id +
                      ") is not finite");
    }
    texts.insert(s.text_id);
    if (!grid[s.system].emplace(s.text_id, s.value).second) {
      problems.push_back("duplicate (" + s.system + ", " + s.text_id + ")");
    }
  }
  for (const auto &[system, row] : grid) {
    for (const std::string &text : texts) {
      if (!row.contains(text)) {
        problems.push_back("missing (" + system + ", " + text + ")");
      }
    }
  }
  if (!problems.empty()) {
    std::string message = "incomplete system x text grid: ";
    const std::size_t shown = std::min<std::size_t>(problems.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) {
      if (i > 0) message += ", ";
      message += problems[i];
    }
    if (shown < problems.size()) {
      message += " and " + std::to_string(problems.size() - shown) + " more";
    }
    throw Error(ErrorCode::kIncompleteGrid, message);
  }

  ScoreVector out;
  for (const auto &[system, row] : grid) {
    double sum = 0.0;
    for (const auto &[text, value] : row) sum += value;
    out.labels.push_back(system);
    out.values.push_back(sum / static_cast<double>(row.size()));
  }
  return out;
}

double AverageExpertScores(std::span<const int> annotations) {
  if (annotations.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no expert annotations");
  }
  double sum = 0.0;
  for (int a : annotations) {
    if (a < 1 || a > 5) {
      throw Error(ErrorCode::kInvalidArgument,
                  "expert score " + std::to_string(a) + " outside 1..5");
    }
    sum += a;
  }
  return sum / static_cast<double>(annotations.size());
}

}  // namespace estime
