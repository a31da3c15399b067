/*
 * Copyright (c) 2026, The dualcache Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <random>

namespace dualcache {

// All randomness goes through std::mt19937_64, whose output sequence is fixed
// by the standard. The std:: distributions are not (they differ between
// standard libraries), so bounded integers and unit reals are derived here.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stream domains keep presampling draws independent from inference draws
/// that share the same global seed and batch index.
enum class StreamDomain : std::uint64_t {
  kInference = 0x1,
  kPresample = 0x2,
  kGenerator = 0x3,
};

/// Engine for batch `index` under `seed`. Depends only on the triple, so
/// batches can be sampled in any order or concurrently.
inline Engine substream(std::uint64_t seed, StreamDomain domain, std::uint64_t index) {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ static_cast<std::uint64_t>(domain));
  s = mix64(s ^ index);
  return Engine(s);
}

/// Uniform integer in [0, bound). bound must be nonzero. Lemire's multiply
/// and reject method, exact (no modulo bias).
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t bound) {
  using u128 = unsigned __int128;
  std::uint64_t x = rng();
  u128 m = static_cast<u128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = rng();
      m = static_cast<u128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace dualcache
