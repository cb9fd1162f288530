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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "estime/error.h"
#include "estime/harness.h"
#include "test_util.h"

namespace estime {
namespace {

// Grid of systems x texts with expert consistency annotations.
std::vector<PairRecord> GridPairs(int systems, int texts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PairRecord> pairs;
  for (int t = 0; t < texts; ++t) {
    for (int s = 0; s < systems; ++s) {
      PairRecord p;
      p.id = "d" + std::to_string(t) + "-M" + std::to_string(s);
      p.text = "text number " + std::to_string(t);
      p.summary = "summary";
      p.system = "M" + std::to_string(s);
      for (int e = 0; e < 3; ++e) {
        p.quality_scores["consistency"].push_back(
            1 + static_cast<int>(rng() % 5));
      }
      pairs.push_back(p);
    }
  }
  return pairs;
}

ScoreFile ScoresFrom(const std::vector<PairRecord> &pairs, bool negative,
                     const std::function<double(const PairRecord &)> &fn) {
  ScoreFile file;
  file.meta.measure = "m";
  file.meta.negative_sense = negative;
  for (const PairRecord &p : pairs) {
    file.records.push_back({p.id, "m", fn(p), std::nullopt});
  }
  return file;
}

double Consistency(const PairRecord &p) {
  return QualityValue(p, "consistency");
}

TEST(CorrelateTest, IdenticalScoresGiveRhoOne) {
  const auto pairs = GridPairs(4, 10, 1);
  const auto result = CorrelateScores(
      pairs, ScoresFrom(pairs, false, Consistency), CorrelateOptions{});
  EXPECT_DOUBLE_EQ(result.report.rho, 1.0);
  EXPECT_DOUBLE_EQ(result.report.tau_c,
                   testing::OracleTauC(
                       [&] {
                         std::vector<double> v;
                         for (const auto &p : pairs) v.push_back(Consistency(p));
                         return v;
                       }(),
                       [&] {
                         std::vector<double> v;
                         for (const auto &p : pairs) v.push_back(Consistency(p));
                         return v;
                       }()));
  EXPECT_EQ(result.report.n, pairs.size());
}

TEST(CorrelateTest, NegativeSenseMeasuresAreNegated) {
  const auto pairs = GridPairs(4, 10, 2);
  const auto result = CorrelateScores(
      pairs,
      ScoresFrom(pairs, true, [](const PairRecord &p) { return -Consistency(p); }),
      CorrelateOptions{});
  EXPECT_DOUBLE_EQ(result.report.rho, 1.0);
  EXPECT_TRUE(result.negative_sense);
}

TEST(CorrelateTest, RowOrderDoesNotMatter) {
  auto pairs = GridPairs(5, 12, 3);
  std::mt19937_64 rng(9);
  auto scores = ScoresFrom(pairs, true, [&](const PairRecord &) {
    return static_cast<double>(rng() % 7);
  });
  CorrelateOptions options;
  options.permutation.permutations = 500;
  const auto a = CorrelateScores(pairs, scores, options);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::shuffle(scores.records.begin(), scores.records.end(), rng);
  const auto b = CorrelateScores(pairs, scores, options);
  EXPECT_EQ(a.report.rho, b.report.rho);
  EXPECT_EQ(a.report.tau_c, b.report.tau_c);
  EXPECT_EQ(a.report.rho_p, b.report.rho_p);
  EXPECT_EQ(a.report.tau_p, b.report.tau_p);
}

TEST(CorrelateTest, SystemLevelAveragesPerSystem) {
  const auto pairs = GridPairs(4, 6, 4);
  // System i scores i on every text: averages are 0, 1, 2, 3.
  const auto scores = ScoresFrom(pairs, false, [](const PairRecord &p) {
    return static_cast<double>(p.system->back() - '0');
  });
  CorrelateOptions options;
  options.level = Level::kSystem;
  const auto result = CorrelateScores(pairs, scores, options);
  EXPECT_EQ(result.report.n, 4u);

  std::vector<double> expert(4, 0.0);
  for (const auto &p : pairs) expert[p.system->back() - '0'] += Consistency(p) / 6;
  const std::vector<double> systems = {0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(result.report.rho, testing::OracleSpearman(systems, expert));
}

TEST(CorrelateTest, SystemLevelNeedsACompleteGrid) {
  auto pairs = GridPairs(3, 4, 5);
  pairs.pop_back();
  const auto scores = ScoresFrom(pairs, false, Consistency);
  CorrelateOptions options;
  options.level = Level::kSystem;
  try {
    CorrelateScores(pairs, scores, options);
    FAIL() << "expected an error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kIncompleteGrid);
  }
}

TEST(CorrelateTest, MissingIdsAreListed) {
  const auto pairs = GridPairs(2, 3, 6);
  auto scores = ScoresFrom(pairs, false, Consistency);
  scores.records.erase(scores.records.begin() + 2);
  try {
    CorrelateScores(pairs, scores, CorrelateOptions{});
    FAIL() << "expected an error";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingIds);
    EXPECT_NE(std::string(e.what()).find(pairs[2].id), std::string::npos);
  }
}

TEST(CorrelateTest, GoldLabelsWithTwoValues) {
  std::vector<PairRecord> pairs;
  for (int i = 0; i < 40; ++i) {
    PairRecord p;
    p.id = "p" + std::to_string(i);
    p.gold_label = i % 2;
    pairs.push_back(p);
  }
  std::mt19937_64 rng(3);
  const auto scores = ScoresFrom(pairs, true, [&](const PairRecord &p) {
    return static_cast<double>(rng() % 4) - 2.0 * *p.gold_label;
  });
  CorrelateOptions options;
  options.quality = std::string(kGoldQuality);
  const auto result = CorrelateScores(pairs, scores, options);
  EXPECT_TRUE(std::isfinite(result.report.tau_c));
  EXPECT_GE(result.report.tau_c, -1.0);
  EXPECT_LE(result.report.tau_c, 1.0);
  EXPECT_GT(result.report.rho, 0.0);
}

TEST(CorrelateTest, ReportJson) {
  MeasureCorrelation m;
  m.measure = "ESTIME-24";
  m.negative_sense = true;
  m.report = {0.5, 0.01, 0.25, 0.02, 10};
  CorrelateOptions options;
  const auto j = ReportToJson(std::vector<MeasureCorrelation>{m}, options);
  EXPECT_EQ(j["level"], "summary");
  EXPECT_EQ(j["results"][0]["measure"], "ESTIME-24");
  EXPECT_EQ(j["results"][0]["tau_c"], 0.25);
  EXPECT_EQ(ParseLevel("system"), Level::kSystem);
  EXPECT_THROW(ParseLevel("pair"), Error);
}

}  // namespace
}  // namespace estime
