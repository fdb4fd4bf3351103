// Copyright 2026 The parheap Authors
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

// Seeded random 32-bit workloads.
//
// Keys are the upper 32 bits of std::mt19937_64 output reinterpreted as
// int32_t, so they cover the full signed range uniformly. mt19937_64's output
// sequence is fixed by the C++ standard, making workloads reproducible across
// platforms and standard libraries.

#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace parheap {

using key32_t = std::int32_t;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for one (size, repetition) cell. Independent of the method, so every
/// method in an experiment sees the same input for the same cell.
inline std::uint64_t derive_seed(std::uint64_t base, std::int64_t n, std::int64_t rep) {
  std::uint64_t s = splitmix64(base);
  s = splitmix64(s ^ static_cast<std::uint64_t>(n));
  return splitmix64(s ^ static_cast<std::uint64_t>(rep));
}

inline std::vector<key32_t> generate_workload(std::int64_t n, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("workload size must be non-negative");
  std::mt19937_64 rng(seed);
  std::vector<key32_t> out(static_cast<std::size_t>(n));
  for (auto &k : out) k = std::bit_cast<key32_t>(static_cast<std::uint32_t>(rng() >> 32));
  return out;
}

} // namespace parheap
