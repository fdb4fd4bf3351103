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

// Test-only reference implementations. These follow the original
// constructor loop and recursive swap-based heapify line by line and share
// no code with the library's sift loops.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using ll = long long;

struct LoopGeometry {
  ll block_sz = 0;
  ll sub_block_sz = 0;
  ll block_width = 0;
  ll block_ch_cnt = 0;
};

/// The block constants computed by iterating level by level.
inline LoopGeometry geometry_by_loop(ll block_depth, ll intra_ch_cnt, ll inter_ch_cnt) {
  LoopGeometry g;
  g.block_width = 1;
  g.block_sz = 1;
  g.sub_block_sz = 0;
  for (ll i = 0; i < block_depth; i++) {
    g.sub_block_sz += g.block_width;
    g.block_width *= intra_ch_cnt;
    g.block_sz += g.block_width;
  }
  g.block_ch_cnt = g.block_width * inter_ch_cnt;
  return g;
}

/// Recursive swap-based max-heapify over (super-node, local index).
struct RecursiveHeap {
  std::vector<int> data;
  ll n = 0;
  ll intra_ch_cnt = 0;
  ll inter_ch_cnt = 0;
  LoopGeometry g;

  RecursiveHeap(ll d, ll a, ll b, std::vector<int> keys)
      : data(std::move(keys)), n(static_cast<ll>(data.size())), intra_ch_cnt(a), inter_ch_cnt(b),
        g(geometry_by_loop(d, a, b)) {}

  void heapify(ll I, ll localI) {
    ll index = I * g.block_sz + localI;
    if (localI >= g.sub_block_sz) {
      ll itI = I * g.block_ch_cnt + 1 + (localI - g.sub_block_sz) * inter_ch_cnt;
      ll start = itI * g.block_sz;
      ll end = std::min(start + inter_ch_cnt * g.block_sz, n);
      int mx = data[index];
      ll mx_I = I;
      for (; start < end; start += g.block_sz, ++itI) {
        if (data[start] > mx) {
          mx = data[start];
          mx_I = itI;
        }
      }
      if (mx_I == I) return;
      std::swap(data[mx_I * g.block_sz], data[index]);
      heapify(mx_I, 0);
      return;
    }
    ll start = I * g.block_sz + localI * intra_ch_cnt + 1;
    ll end = std::min(start + intra_ch_cnt, n);
    int mx = data[index];
    ll mx_index = index;
    for (; start < end; ++start) {
      if (data[start] > mx) {
        mx = data[start];
        mx_index = start;
      }
    }
    if (mx_index == index) return;
    std::swap(data[mx_index], data[index]);
    heapify(I, mx_index - I * g.block_sz);
  }

  void heapify_index(ll i) { heapify(i / g.block_sz, i % g.block_sz); }

  void build() {
    for (ll i = n - 1; i >= 0; --i) heapify_index(i);
  }

  void sort() {
    const ll total = n;
    while (n > 1) {
      std::swap(data[0], data[n - 1]);
      --n;
      heapify(0, 0);
    }
    n = total;
  }
};

/// Smallest depth whose single block holds n nodes, by direct summation.
inline ll covering_depth(ll a, ll n) {
  ll d = 1;
  while (geometry_by_loop(d, a, 1).block_sz < n) ++d;
  return d;
}

inline std::vector<int> random_keys(std::mt19937_64 &rng, std::size_t n, int lo = INT32_MIN,
                                    int hi = INT32_MAX) {
  std::uniform_int_distribution<int> dist(lo, hi);
  std::vector<int> v(n);
  for (auto &x : v) x = dist(rng);
  return v;
}

} // namespace oracle
