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

/** \file

  Heap algorithms over the blocked layout, plus a ParHeap container.

  Orientation follows the std heap functions: with the default std::less the
  element that compares greatest sits at index 0, and sort_heap leaves the
  range ascending. A child replaces its parent only when it is strictly
  greater than every earlier candidate, so equal keys are never exchanged.

  The free functions operate on a std::span so that benchmarks can sort a
  buffer in place; ParHeap owns a single std::vector and adds push/pop.
 */

#pragma once

#include <parheap/layout.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace parheap {

class EmptyHeap : public std::out_of_range {
public:
  EmptyHeap() : std::out_of_range("heap is empty") {}
};

/// A (parent, child) pair whose keys are out of heap order.
struct Violation {
  index_t parent = 0;
  index_t child = 0;
  friend bool operator==(const Violation &, const Violation &) = default;
};

namespace detail {

/// The subset of LayoutGeometry the sift loops touch, copied into locals.
struct SiftConstants {
  index_t block_size;
  index_t sub_block_size;
  index_t intra;
  index_t inter;
  index_t block_child_count;

  explicit SiftConstants(const LayoutGeometry &g)
      : block_size(g.block_size()), sub_block_size(g.sub_block_size()), intra(g.intra()),
        inter(g.inter()), block_child_count(g.block_child_count()) {}
};

/// Sift-down over the first n elements. With SingleInter the block-leaf
/// branch assumes inter == 1 and drops the candidate loop.
template <bool SingleInter, class Key, class Compare>
void sift_down_impl(Key *data, index_t n, const SiftConstants &c, index_t index,
                    Compare &comp) {
  const index_t last_block = (n - 1) / c.block_size;
  index_t super = index / c.block_size;
  index_t local = index - super * c.block_size;
  index_t hole = index;
  Key value = std::move(data[hole]);

  for (;;) {
    if (local < c.sub_block_size) {
      const index_t base = super * c.block_size;
      index_t child = base + local * c.intra + 1;
      if (child >= n) break;
      const index_t end = std::min(child + c.intra, n);
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
      local = best_idx - base;
    } else {
      const index_t first = super * c.block_child_count + 1 + (local - c.sub_block_size) *
                                                                   (SingleInter ? 1 : c.inter);
      if (first > last_block) break;
      index_t best_block = -1;
      if constexpr (SingleInter) {
        if (comp(value, data[first * c.block_size])) best_block = first;
      } else {
        const Key *best = &value;
        const index_t stop = std::min(first + c.inter - 1, last_block);
        for (index_t blk = first; blk <= stop; ++blk) {
          if (comp(*best, data[blk * c.block_size])) {
            best = &data[blk * c.block_size];
            best_block = blk;
          }
        }
      }
      if (best_block < 0) break;
      const index_t root = best_block * c.block_size;
      data[hole] = std::move(data[root]);
      hole = root;
      super = best_block;
      local = 0;
    }
  }
  data[hole] = std::move(value);
}

template <class Key, class Compare>
void sift_down_general(std::span<Key> data, index_t n, const LayoutGeometry &geom,
                       index_t index, Compare comp = {}) {
  if (index >= n) return;
  sift_down_impl<false>(data.data(), n, SiftConstants(geom), index, comp);
}

template <class Key, class Compare>
void sift_down_single_inter(std::span<Key> data, index_t n, const LayoutGeometry &geom,
                            index_t index, Compare comp = {}) {
  if (geom.inter() != 1)
    throw ContractViolation("single-inter sift-down requires inter child count 1");
  if (index >= n) return;
  sift_down_impl<true>(data.data(), n, SiftConstants(geom), index, comp);
}

template <bool SingleInter, class Key, class Compare>
void make_heap_impl(Key *data, index_t n, const SiftConstants &c, Compare &comp) {
  for (index_t i = n - 1; i >= 0; --i) sift_down_impl<SingleInter>(data, n, c, i, comp);
}

template <bool SingleInter, class Key, class Compare>
void sort_heap_impl(Key *data, index_t n, const SiftConstants &c, Compare &comp) {
  for (; n > 1; --n) {
    std::swap(data[0], data[n - 1]);
    if (n - 1 > 1) sift_down_impl<SingleInter>(data, n - 1, c, 0, comp);
  }
}

} // namespace detail

/// Restores heap order below `index`, assuming its child subtrees are heaps.
template <class Key, class Compare = std::less<Key>>
void sift_down(std::span<Key> data, index_t n, const LayoutGeometry &geom, index_t index,
               Compare comp = {}) {
  if (index < 0 || index >= n) return;
  const detail::SiftConstants c(geom);
  if (c.inter == 1)
    detail::sift_down_impl<true>(data.data(), n, c, index, comp);
  else
    detail::sift_down_impl<false>(data.data(), n, c, index, comp);
}

/// Moves the element at `index` towards the root while it beats its parent.
template <class Key, class Compare = std::less<Key>>
void sift_up(std::span<Key> data, const LayoutGeometry &geom, index_t index, Compare comp = {}) {
  if (index <= 0) return;
  const index_t bs = geom.block_size();
  index_t super = index / bs;
  index_t local = index - super * bs;
  index_t hole = index;
  Key value = std::move(data[hole]);
  for (;;) {
    index_t parent;
    if (local > 0) {
      local = (local - 1) / geom.intra();
      parent = super * bs + local;
    } else {
      if (super == 0) break;
      const index_t off = super - 1;
      super = off / geom.block_child_count();
      local = geom.sub_block_size() + (off % geom.block_child_count()) / geom.inter();
      parent = super * bs + local;
    }
    if (!comp(data[parent], value)) break;
    data[hole] = std::move(data[parent]);
    hole = parent;
  }
  data[hole] = std::move(value);
}

/// Bottom-up build: sift-down at every index from size-1 to 0.
template <class Key, class Compare = std::less<Key>>
void make_heap(std::span<Key> data, const LayoutGeometry &geom, Compare comp = {}) {
  const auto n = static_cast<index_t>(data.size());
  if (n < 2) return;
  const detail::SiftConstants c(geom);
  if (c.inter == 1)
    detail::make_heap_impl<true>(data.data(), n, c, comp);
  else
    detail::make_heap_impl<false>(data.data(), n, c, comp);
}

/// Repeatedly moves the top to the shrinking tail. Requires heap order.
template <class Key, class Compare = std::less<Key>>
void sort_heap(std::span<Key> data, const LayoutGeometry &geom, Compare comp = {}) {
  const auto n = static_cast<index_t>(data.size());
  const detail::SiftConstants c(geom);
  if (c.inter == 1)
    detail::sort_heap_impl<true>(data.data(), n, c, comp);
  else
    detail::sort_heap_impl<false>(data.data(), n, c, comp);
}

/// make_heap followed by sort_heap.
template <class Key, class Compare = std::less<Key>>
void heap_sort(std::span<Key> data, const LayoutGeometry &geom, Compare comp = {}) {
  make_heap(data, geom, comp);
  sort_heap(data, geom, comp);
}

/// Every (parent, child) pair, over both child maps, where the child beats
/// the parent. Empty iff the range is a heap.
template <class Key, class Compare = std::less<Key>>
std::vector<Violation> validate_heap(std::span<const Key> data, const LayoutGeometry &geom,
                                     Compare comp = {}) {
  std::vector<Violation> out;
  const auto n = static_cast<index_t>(data.size());
  for (index_t i = 0; i < n; ++i)
    for (index_t child : children_of(i, geom, n))
      if (comp(data[i], data[child])) out.push_back({i, child});
  return out;
}

/// Priority queue stored in one contiguous block using the blocked layout.
template <class Key, class Compare = std::less<Key>>
class ParHeap {
public:
  explicit ParHeap(const HeapParams &params = {}, Compare comp = Compare())
      : geom_(derive_geometry(params)), comp_(std::move(comp)) {}

  /// Adopts `keys` as-is; call build() to establish heap order.
  ParHeap(const HeapParams &params, std::vector<Key> keys, Compare comp = Compare())
      : geom_(derive_geometry(params)), data_(std::move(keys)), comp_(std::move(comp)) {}

  [[nodiscard]] const LayoutGeometry &geometry() const { return geom_; }
  [[nodiscard]] std::span<const Key> data() const { return data_; }
  [[nodiscard]] index_t size() const { return static_cast<index_t>(data_.size()); }
  [[nodiscard]] bool empty() const { return data_.empty(); }

  void reserve(index_t capacity) { data_.reserve(static_cast<std::size_t>(capacity)); }

  /// Replaces the contents without reordering them.
  void assign(std::vector<Key> keys) { data_ = std::move(keys); }

  /// Releases the underlying storage, leaving the heap empty.
  std::vector<Key> release() { return std::exchange(data_, {}); }

  void sift_down(const NodePos &pos) {
    parheap::sift_down(std::span<Key>(data_), size(), geom_, global_index(pos, geom_), comp_);
  }

  void build() { parheap::make_heap(std::span<Key>(data_), geom_, comp_); }

  /// Sorts the contents ascending under Compare. Heap order is consumed; the
  /// size is unchanged and build() must be called before further pops.
  void heap_sort() { parheap::sort_heap(std::span<Key>(data_), geom_, comp_); }

  void push(Key key) {
    data_.push_back(std::move(key));
    parheap::sift_up(std::span<Key>(data_), geom_, size() - 1, comp_);
  }

  Key pop() {
    if (data_.empty()) throw EmptyHeap();
    std::swap(data_.front(), data_.back());
    Key top = std::move(data_.back());
    data_.pop_back();
    parheap::sift_down(std::span<Key>(data_), size(), geom_, 0, comp_);
    return top;
  }

  [[nodiscard]] const Key &peek() const {
    if (data_.empty()) throw EmptyHeap();
    return data_.front();
  }

  [[nodiscard]] std::vector<Violation> validate() const {
    return validate_heap(std::span<const Key>(data_), geom_, comp_);
  }

private:
  LayoutGeometry geom_;
  std::vector<Key> data_;
  Compare comp_;
};

} // namespace parheap
