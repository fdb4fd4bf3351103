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

// Plain implicit d-ary heap: children of j are arity*j+1 .. arity*j+arity.
// Serves as the comparison baseline and as the reference the blocked layout
// must reproduce when a single super-node covers the whole heap.

#pragma once

#include <parheap/layout.hpp>
#include <parheap/par_heap.hpp>

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace parheap {

template <class Key, class Compare = std::less<Key>>
void baseline_sift_down(std::span<Key> data, index_t n, index_t arity, index_t index,
                        Compare comp = {}) {
  if (index < 0 || index >= n) return;
  index_t hole = index;
  Key value = std::move(data[hole]);
  for (;;) {
    index_t child = hole * arity + 1;
    if (child >= n) break;
    const index_t end = std::min(child + arity, n);
    const Key *best = &value;
    index_t best_idx = -1;
    for (; child < end; ++child) {
      if (comp(*best, data[child])) {
        best = &data[child];
        best_idx = child;
      }
    }
    if (best_idx < 0) break;
    data[hole] = std::move(data[best_idx]);
    hole = best_idx;
  }
  data[hole] = std::move(value);
}

template <class Key, class Compare = std::less<Key>>
void baseline_make_heap(std::span<Key> data, index_t arity, Compare comp = {}) {
  const auto n = static_cast<index_t>(data.size());
  for (index_t i = n - 1; i >= 0; --i) baseline_sift_down(data, n, arity, i, comp);
}

template <class Key, class Compare = std::less<Key>>
void baseline_sort_heap(std::span<Key> data, index_t arity, Compare comp = {}) {
  for (auto n = static_cast<index_t>(data.size()); n > 1; --n) {
    std::swap(data[0], data[n - 1]);
    baseline_sift_down(data, n - 1, arity, 0, comp);
  }
}

template <class Key, class Compare = std::less<Key>>
class BaselineDaryHeap {
public:
  explicit BaselineDaryHeap(index_t arity = 2, std::vector<Key> keys = {},
                            Compare comp = Compare())
      : arity_(arity), data_(std::move(keys)), comp_(std::move(comp)) {
    if (arity_ < 2) throw InvalidParams("baseline heap arity must be >= 2");
  }

  [[nodiscard]] index_t arity() const { return arity_; }
  [[nodiscard]] std::span<const Key> data() const { return data_; }
  [[nodiscard]] index_t size() const { return static_cast<index_t>(data_.size()); }

  void build() { baseline_make_heap(std::span<Key>(data_), arity_, comp_); }
  void heap_sort() { baseline_sort_heap(std::span<Key>(data_), arity_, comp_); }

  Key pop() {
    if (data_.empty()) throw EmptyHeap();
    std::swap(data_.front(), data_.back());
    Key top = std::move(data_.back());
    data_.pop_back();
    baseline_sift_down(std::span<Key>(data_), size(), arity_, 0, comp_);
    return top;
  }

private:
  index_t arity_;
  std::vector<Key> data_;
  Compare comp_;
};

} // namespace parheap
