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

#include "advspan/rng.h"

#include <numeric>

namespace advspan {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Rng::Rng(uint64_t seed) : engine_(SplitMix64(seed)) {}

Rng::Rng(uint64_t seed, uint64_t stream)
    : engine_(SplitMix64(SplitMix64(seed) ^ SplitMix64(~stream))) {}

Rng::Rng(uint64_t seed, uint64_t stream, uint64_t substream)
    : engine_(SplitMix64(SplitMix64(SplitMix64(seed) ^ SplitMix64(~stream)) ^
                         SplitMix64(substream * 0xD1B54A32D192ED03ull))) {}

uint64_t Rng::Below(uint64_t bound) {
  // Reject the partial block at the top of the range.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<std::size_t> Rng::Sample(std::size_t population,
                                     std::size_t count) {
  if (count > population) count = population;
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + static_cast<std::size_t>(Below(population - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace advspan
