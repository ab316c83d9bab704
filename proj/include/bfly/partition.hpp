#pragma once

#include <string>

#include "bfly/types.hpp"

namespace bfly {

/// Half-open index range [begin, end).
struct IndexRange {
  Index begin = 0;
  Index end = 0;

  Index size() const { return end - begin; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Names the block K^level_{row_node, col_node}: rows from node row_node at
/// `level` of the row tree, columns from node col_node at level L - level of
/// the column tree.
struct BlockId {
  int level = 0;
  Index row_node = 0;
  Index col_node = 0;
};

/// Dyadic trees over {0, ..., n-1} for rows and columns, depth L (even),
/// leaf size n / 2^L.
class DyadicPartition {
 public:
  DyadicPartition(Index n, int levels);

  Index n() const { return n_; }
  int levels() const { return levels_; }
  int half() const { return levels_ / 2; }
  Index leaf_size() const { return n_ >> levels_; }
  /// Number of nodes per tree at the middle level, 2^(L/2).
  Index middle_count() const { return Index{1} << half(); }
  /// Nodes at `level` of either tree.
  static Index nodes_at(int level) { return Index{1} << level; }

  /// Range covered by node `node` at `level` of either tree.
  IndexRange node(int level, Index node) const;

  bool valid(const BlockId& id) const;
  IndexRange block_rows(const BlockId& id) const;
  IndexRange block_cols(const BlockId& id) const;

  friend bool operator==(const DyadicPartition&, const DyadicPartition&) = default;

 private:
  Index n_;
  int levels_;
};

/// Largest even L >= 2 with n / 2^L >= target_leaf. n must be a power of two.
DyadicPartition make_partition(Index n, Index target_leaf);

/// Leaf target used when none is given: the finest admissible tree.
inline constexpr Index kDefaultTargetLeaf = 1;

bool is_power_of_two(Index n);

}  // namespace bfly
