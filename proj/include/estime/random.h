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

#ifndef ESTIME_RANDOM_H_
#define ESTIME_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace estime {

// std::mt19937_64 has a standardized output sequence; the helpers below
// avoid the implementation-defined std distributions so that seeded results
// are identical across standard libraries.
using Rng = std::mt19937_64;

std::uint64_t SplitMix64(std::uint64_t x);
std::uint64_t Fnv1a64(std::string_view bytes);

// Uniform integer in [0, bound); bound must be positive.
std::uint64_t UniformBelow(Rng &rng, std::uint64_t bound);

// Uniform real in [0, 1) with 53 random bits.
double UniformUnit(Rng &rng);

template <typename T>
void Shuffle(std::span<T> values, Rng &rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = UniformBelow(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

// `k` distinct indices drawn uniformly from [0, n), returned in ascending
// order. Requires k <= n.
std::vector<std::size_t> SampleIndices(std::size_t n, std::size_t k, Rng &rng);

}  // namespace estime

#endif  // ESTIME_RANDOM_H_
