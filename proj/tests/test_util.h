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

// Helpers shared by the unit and acceptance tests, including brute-force
// reference implementations the library results are checked against.

#ifndef ESTIME_TESTS_TEST_UTIL_H_
#define ESTIME_TESTS_TEST_UTIL_H_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace estime::testing {

// Average ranks by counting: 1 + #smaller + (#equal - 1) / 2.
inline std::vector<double> OracleRanks(const std::vector<double> &v) {
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double smaller = 0.0;
    double equal = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) smaller += 1.0;
      if (v[j] == v[i]) equal += 1.0;
    }
    ranks[i] = 1.0 + smaller + (equal - 1.0) / 2.0;
  }
  return ranks;
}

inline double OraclePearson(const std::vector<double> &x,
                            const std::vector<double> &y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double OracleSpearman(const std::vector<double> &x,
                             const std::vector<double> &y) {
  return OraclePearson(OracleRanks(x), OracleRanks(y));
}

// Concordant minus discordant pairs by visiting every pair.
inline std::int64_t OracleBalance(const std::vector<double> &x,
                                  const std::vector<double> &y) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double p = (x[i] - x[j]) * (y[i] - y[j]);
      if (p > 0) ++s;
      if (p < 0) --s;
    }
  }
  return s;
}

inline double OracleTauC(const std::vector<double> &x,
                         const std::vector<double> &y) {
  const double m = static_cast<double>(
      std::min(std::set<double>(x.begin(), x.end()).size(),
               std::set<double>(y.begin(), y.end()).size()));
  const double n = static_cast<double>(x.size());
  return 2.0 * m * static_cast<double>(OracleBalance(x, y)) /
         (n * n * (m - 1.0));
}

// Lower-case words of 1..3 letters: each is a single mock token.
inline std::string RandomDocument(std::mt19937_64 &rng, int words) {
  std::string out;
  for (int w = 0; w < words; ++w) {
    if (w > 0) out += ' ';
    const int len = 1 + static_cast<int>(rng() % 3);
    for (int c = 0; c < len; ++c) {
      out += static_cast<char>('a' + rng() % 26);
    }
    if (rng() % 10 == 0) out += rng() % 2 ? "," : ".";
  }
  return out;
}

inline std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void WriteFile(const std::filesystem::path &path,
                      const std::string &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path MakeTempDir(const std::string &name) {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / ("estime_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace estime::testing

#endif  // ESTIME_TESTS_TEST_UTIL_H_
