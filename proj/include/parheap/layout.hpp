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

  Index arithmetic for the blocked ("super-node") heap layout.

  A super-node is a complete intra-ary tree with depth+1 levels, stored
  contiguously. Inside a super-node children follow the usual implicit d-ary
  rule relative to the super-node base. Each node on the deepest level of a
  super-node (a "block leaf") owns `inter` consecutive child super-nodes; its
  children are the roots (local index 0) of those super-nodes.

  All arithmetic is done in 64-bit signed integers. Construction of a
  LayoutGeometry rejects parameters whose derived constants would overflow.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace parheap {

using index_t = std::int64_t;

class InvalidParams : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a layout query is made on a node of the wrong kind.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

struct HeapParams {
  index_t depth = 2; ///< intra-block levels below the block root (>= 1)
  index_t intra = 9; ///< fan-out inside a block (>= 2)
  index_t inter = 1; ///< child super-nodes per block leaf (>= 1)

  friend auto operator<=>(const HeapParams &, const HeapParams &) = default;
};

inline std::string to_string(const HeapParams &p) {
  return "(" + std::to_string(p.depth) + ", " + std::to_string(p.intra) +
         ", " + std::to_string(p.inter) + ")";
}

inline std::ostream &operator<<(std::ostream &os, const HeapParams &p) {
  return os << to_string(p);
}

struct NodePos {
  index_t super_idx = 0;
  index_t local_idx = 0;

  friend bool operator==(const NodePos &, const NodePos &) = default;
};

inline std::ostream &operator<<(std::ostream &os, const NodePos &p) {
  return os << "pos(" << p.super_idx << ", " << p.local_idx << ")";
}

/// Half-open range of global indices with unit stride.
struct IndexRange {
  index_t start = 0;
  index_t end = 0;

  [[nodiscard]] bool empty() const { return start >= end; }
  [[nodiscard]] index_t size() const { return empty() ? 0 : end - start; }
  friend bool operator==(const IndexRange &, const IndexRange &) = default;
};

struct ChildBlock {
  index_t super_idx = 0; ///< index of the child super-node
  index_t root = 0;      ///< global index of its root

  friend bool operator==(const ChildBlock &, const ChildBlock &) = default;
};

namespace detail {

inline bool checked_mul(index_t a, index_t b, index_t &out) {
  return !__builtin_mul_overflow(a, b, &out);
}

inline bool checked_add(index_t a, index_t b, index_t &out) {
  return !__builtin_add_overflow(a, b, &out);
}

} // namespace detail

/// Derived block constants for one HeapParams triple. Immutable once built;
/// obtain one through derive_geometry().
class LayoutGeometry {
public:
  [[nodiscard]] const HeapParams &params() const { return params_; }
  [[nodiscard]] index_t depth() const { return params_.depth; }
  [[nodiscard]] index_t intra() const { return params_.intra; }
  [[nodiscard]] index_t inter() const { return params_.inter; }

  /// nodes per super-node: 1 + a + ... + a^d
  [[nodiscard]] index_t block_size() const { return block_size_; }
  /// non-leaf nodes per super-node: (a^d - 1) / (a - 1)
  [[nodiscard]] index_t sub_block_size() const { return sub_block_size_; }
  /// block-leaf nodes per super-node: a^d
  [[nodiscard]] index_t block_width() const { return block_width_; }
  /// child super-nodes per super-node: a^d * b
  [[nodiscard]] index_t block_child_count() const { return block_child_count_; }

  friend bool operator==(const LayoutGeometry &, const LayoutGeometry &) = default;

private:
  friend LayoutGeometry derive_geometry(const HeapParams &params);

  HeapParams params_{};
  index_t block_size_ = 0;
  index_t sub_block_size_ = 0;
  index_t block_width_ = 0;
  index_t block_child_count_ = 0;
};

inline void validate_params(const HeapParams &p) {
  if (p.depth < 1)
    throw InvalidParams("block depth must be >= 1, got " + std::to_string(p.depth));
  if (p.intra < 2)
    throw InvalidParams("intra child count must be >= 2, got " + std::to_string(p.intra));
  if (p.inter < 1)
    throw InvalidParams("inter child count must be >= 1, got " + std::to_string(p.inter));
}

/// Computes the block constants in closed form. Throws InvalidParams for
/// out-of-range parameters or when intra^(depth+1) does not fit in 64 bits.
inline LayoutGeometry derive_geometry(const HeapParams &params) {
  validate_params(params);
  const auto overflow = [&] {
    return InvalidParams("layout " + to_string(params) + " overflows 64-bit index arithmetic");
  };

  // a^d, then a^(d+1) purely as an overflow guard
  index_t width = 1;
  for (index_t i = 0; i < params.depth; ++i)
    if (!detail::checked_mul(width, params.intra, width)) throw overflow();
  index_t next_level = 0;
  if (!detail::checked_mul(width, params.intra, next_level)) throw overflow();

  LayoutGeometry g;
  g.params_ = params;
  g.block_width_ = width;
  g.sub_block_size_ = (width - 1) / (params.intra - 1);
  if (!detail::checked_add(g.sub_block_size_, width, g.block_size_)) throw overflow();
  if (!detail::checked_mul(width, params.inter, g.block_child_count_)) throw overflow();
  return g;
}

inline index_t global_index(const NodePos &pos, const LayoutGeometry &geom) {
  return pos.super_idx * geom.block_size() + pos.local_idx;
}

inline NodePos position_of(index_t index, const LayoutGeometry &geom) {
  if (index < 0) throw std::out_of_range("negative heap index " + std::to_string(index));
  return {index / geom.block_size(), index % geom.block_size()};
}

inline bool is_block_leaf(const NodePos &pos, const LayoutGeometry &geom) {
  return pos.local_idx >= geom.sub_block_size();
}

/// Children of an internal node; they live in the same super-node.
inline IndexRange intra_children_range(const NodePos &pos, const LayoutGeometry &geom,
                                       index_t n) {
  if (is_block_leaf(pos, geom))
    throw ContractViolation("intra_children_range called on a block leaf");
  const index_t start = pos.super_idx * geom.block_size() + pos.local_idx * geom.intra() + 1;
  const index_t end = std::min(start + geom.intra(), n);
  return {start, std::max(start, end)};
}

/// Index of the first child super-node of a block leaf.
inline index_t first_child_block(const NodePos &pos, const LayoutGeometry &geom) {
  return pos.super_idx * geom.block_child_count() + 1 +
         (pos.local_idx - geom.sub_block_size()) * geom.inter();
}

/// Roots of the child super-nodes of a block leaf, truncated to roots below n.
inline std::vector<ChildBlock> inter_children_roots(const NodePos &pos,
                                                    const LayoutGeometry &geom,
                                                    index_t n) {
  if (!is_block_leaf(pos, geom))
    throw ContractViolation("inter_children_roots called on an internal node");
  std::vector<ChildBlock> out;
  if (n <= 0) return out;
  const index_t last_block = (n - 1) / geom.block_size();
  index_t child = first_child_block(pos, geom);
  for (index_t k = 0; k < geom.inter() && child <= last_block; ++k, ++child)
    out.push_back({child, child * geom.block_size()});
  return out;
}

/// Inverse of the two child maps. The global root (0, 0) has no parent.
inline std::optional<NodePos> parent_of(const NodePos &pos, const LayoutGeometry &geom) {
  if (pos.local_idx > 0) return NodePos{pos.super_idx, (pos.local_idx - 1) / geom.intra()};
  if (pos.super_idx == 0) return std::nullopt;
  const index_t off = pos.super_idx - 1;
  const index_t owner = off / geom.block_child_count();
  const index_t slot = off % geom.block_child_count();
  return NodePos{owner, geom.sub_block_size() + slot / geom.inter()};
}

/// True when every one of n nodes fits in super-node 0, i.e. the layout is
/// indistinguishable from a plain intra-ary heap.
inline bool covers_whole_heap(const LayoutGeometry &geom, index_t n) {
  return geom.block_size() >= n;
}

/// Global indices of all existing children of the node at `index`, in
/// ascending order. Convenience for validation and tests; the sift loops do
/// not go through here.
inline std::vector<index_t> children_of(index_t index, const LayoutGeometry &geom, index_t n) {
  std::vector<index_t> out;
  const NodePos pos = position_of(index, geom);
  if (is_block_leaf(pos, geom)) {
    for (const auto &c : inter_children_roots(pos, geom, n)) out.push_back(c.root);
  } else {
    const IndexRange r = intra_children_range(pos, geom, n);
    for (index_t c = r.start; c < r.end; ++c) out.push_back(c);
  }
  return out;
}

} // namespace parheap
