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

// Self-checks for one layout at one size, as run by `parheap verify`.

#pragma once

#include <parheap/layout.hpp>
#include <parheap/par_heap.hpp>
#include <parheap/workload.hpp>

#include <algorithm>
#include <string>
#include <vector>

namespace parheap {

/// Checks that the child maps partition [1, n): every index has exactly one
/// parent among the nodes below n, and parent_of names that parent. Returns
/// one message per problem, capped at `max_errors`.
inline std::vector<std::string> layout_partition_errors(const LayoutGeometry &geom, index_t n,
                                                        std::size_t max_errors = 20) {
  std::vector<std::string> errors;
  std::vector<index_t> parent(static_cast<std::size_t>(std::max<index_t>(n, 0)), -1);
  const auto report = [&](std::string msg) {
    if (errors.size() < max_errors) errors.push_back(std::move(msg));
  };
  for (index_t i = 0; i < n; ++i) {
    for (index_t c : children_of(i, geom, n)) {
      if (c <= 0 || c >= n) {
        report("node " + std::to_string(i) + " has out-of-range child " + std::to_string(c));
        continue;
      }
      auto &slot = parent[static_cast<std::size_t>(c)];
      if (slot >= 0)
        report("index " + std::to_string(c) + " is a child of both " + std::to_string(slot) +
               " and " + std::to_string(i));
      slot = i;
    }
  }
  for (index_t j = 1; j < n; ++j) {
    const index_t p = parent[static_cast<std::size_t>(j)];
    if (p < 0) {
      report("index " + std::to_string(j) + " has no parent");
      continue;
    }
    const auto inv = parent_of(position_of(j, geom), geom);
    if (!inv || global_index(*inv, geom) != p)
      report("parent_of(" + std::to_string(j) + ") does not invert the child maps");
  }
  if (n > 0 && parent_of(position_of(0, geom), geom))
    report("root reports a parent");
  return errors;
}

struct VerifyOutcome {
  std::vector<std::string> layout_errors;
  std::vector<Violation> heap_violations;
  bool sort_matches = true;

  [[nodiscard]] bool passed() const {
    return layout_errors.empty() && heap_violations.empty() && sort_matches;
  }
};

/// Layout partition, build + validate, and heapsort against std::sort on a
/// seeded workload. With `inject_fault` the built heap has its first and
/// last elements exchanged before validation.
inline VerifyOutcome verify_layout(const HeapParams &params, index_t n, std::uint64_t seed,
                                   bool inject_fault = false) {
  const LayoutGeometry geom = derive_geometry(params);
  VerifyOutcome out;
  out.layout_errors = layout_partition_errors(geom, n);

  std::vector<key32_t> keys = generate_workload(n, seed);
  std::vector<key32_t> expected = keys;
  std::sort(expected.begin(), expected.end());

  make_heap(std::span<key32_t>(keys), geom);
  if (inject_fault && n > 1) std::swap(keys.front(), keys.back());
  out.heap_violations = validate_heap(std::span<const key32_t>(keys), geom);

  if (!inject_fault) {
    sort_heap(std::span<key32_t>(keys), geom);
    out.sort_matches = keys == expected;
  }
  return out;
}

} // namespace parheap
