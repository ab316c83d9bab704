#include "bfly/partition.hpp"

#include <stdexcept>

namespace bfly {

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

namespace {

std::string nearby_sizes(Index n) {
  Index below = 1;
  while (below * 2 <= n) below *= 2;
  const Index above = below * 2;
  return std::to_string(below < 4 ? 4 : below) + " or " + std::to_string(above);
}

}  // namespace

DyadicPartition::DyadicPartition(Index n, int levels) : n_(n), levels_(levels) {
  if (levels < 2 || levels % 2 != 0) {
    throw std::invalid_argument("partition depth must be even and >= 2, got " +
                                std::to_string(levels));
  }
  if (levels >= 62 || n < (Index{1} << levels) || (n % (Index{1} << levels)) != 0) {
    throw std::invalid_argument("n = " + std::to_string(n) + " is not a multiple of 2^" +
                                std::to_string(levels));
  }
}

IndexRange DyadicPartition::node(int level, Index node) const {
  if (level < 0 || level > levels_ || node < 0 || node >= nodes_at(level)) {
    throw std::invalid_argument("tree node (" + std::to_string(level) + ", " +
                                std::to_string(node) + ") out of range");
  }
  const Index width = n_ >> level;
  return {node * width, (node + 1) * width};
}

bool DyadicPartition::valid(const BlockId& id) const {
  return id.level >= 0 && id.level <= levels_ && id.row_node >= 0 &&
         id.row_node < nodes_at(id.level) && id.col_node >= 0 &&
         id.col_node < nodes_at(levels_ - id.level);
}

IndexRange DyadicPartition::block_rows(const BlockId& id) const {
  if (!valid(id)) throw std::invalid_argument("invalid block id");
  return node(id.level, id.row_node);
}

IndexRange DyadicPartition::block_cols(const BlockId& id) const {
  if (!valid(id)) throw std::invalid_argument("invalid block id");
  return node(levels_ - id.level, id.col_node);
}

DyadicPartition make_partition(Index n, Index target_leaf) {
  if (!is_power_of_two(n) || n < 4) {
    throw std::invalid_argument("n = " + std::to_string(n) +
                                " admits no dyadic partition; use a power of two such as " +
                                nearby_sizes(n));
  }
  if (target_leaf < 1) target_leaf = 1;
  int best = -1;
  for (int levels = 2; (Index{1} << levels) <= n; levels += 2) {
    if ((n >> levels) >= target_leaf) best = levels;
  }
  if (best < 0) {
    // Fall back to the coarsest tree if its leaves reach half the target.
    const Index min_leaf = std::max<Index>(1, target_leaf / 2);
    if ((n >> 2) >= min_leaf) {
      best = 2;
    } else {
      throw std::invalid_argument("n = " + std::to_string(n) + " too small for leaf size " +
                                  std::to_string(target_leaf));
    }
  }
  return DyadicPartition(n, best);
}

}  // namespace bfly
