// Copyright 2026 The advspan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADVSPAN_RNG_H_
#define ADVSPAN_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace advspan {

// Deterministic generator used for every seeded choice in the toolkit.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Stream keys are folded into the seed with SplitMix64. Bounded
// draws use rejection sampling on the raw 64-bit output rather than
// std::uniform_int_distribution, whose algorithm varies between standard
// libraries. Output is therefore stable across compilers and releases.
class Rng {
 public:
  explicit Rng(uint64_t seed);
  // Independent stream for (seed, stream...) tuples, e.g. (seed, paragraph).
  Rng(uint64_t seed, uint64_t stream);
  Rng(uint64_t seed, uint64_t stream, uint64_t substream);

  uint64_t Next() { return engine_(); }
  // Uniform in [0, bound). `bound` must be positive.
  uint64_t Below(uint64_t bound);
  // Uniform in [0, 1).
  double Uniform();

  // Chooses `count` distinct indices from [0, population) uniformly without
  // replacement (partial Fisher-Yates). Order of the result is draw order.
  std::vector<std::size_t> Sample(std::size_t population, std::size_t count);

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

uint64_t SplitMix64(uint64_t x);

}  // namespace advspan

#endif  // ADVSPAN_RNG_H_
