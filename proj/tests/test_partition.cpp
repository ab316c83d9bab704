#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "bfly/partition.hpp"

using namespace bfly;

TEST_CASE("make_partition picks the deepest even tree") {
  const DyadicPartition a = make_partition(64, 2);
  CHECK(a.levels() == 4);
  CHECK(a.leaf_size() == 4);
  CHECK(a.half() == 2);

  const DyadicPartition b = make_partition(1024, 16);
  CHECK(b.levels() == 6);
  CHECK(b.leaf_size() == 16);
  CHECK(b.half() == 3);

  const DyadicPartition c = make_partition(1024, 1);
  CHECK(c.levels() == 10);
  CHECK(c.leaf_size() == 1);
  CHECK(c.middle_count() == 32);
}

TEST_CASE("make_partition rejects sizes without a dyadic tree") {
  CHECK_THROWS_AS(make_partition(48, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_partition(100, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_partition(2, 1), std::invalid_argument);
  try {
    make_partition(48, 2);
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("32") != std::string::npos);
    CHECK(msg.find("64") != std::string::npos);
  }
}

TEST_CASE("constructor invariants") {
  CHECK_THROWS_AS(DyadicPartition(64, 3), std::invalid_argument);
  CHECK_THROWS_AS(DyadicPartition(64, 0), std::invalid_argument);
  CHECK_THROWS_AS(DyadicPartition(60, 4), std::invalid_argument);
  CHECK_NOTHROW(DyadicPartition(48, 4));
  const DyadicPartition p(64, 6);
  CHECK(p.middle_count() * p.middle_count() == (Index{1} << p.levels()));
}

TEST_CASE("block ranges follow the node formula") {
  const DyadicPartition p(64, 4);
  CHECK(p.block_rows({2, 1, 0}) == IndexRange{16, 32});
  CHECK(p.block_cols({2, 1, 0}) == IndexRange{0, 16});
  CHECK(p.block_rows({4, 15, 0}) == IndexRange{60, 64});
  CHECK(p.block_cols({4, 15, 0}) == IndexRange{0, 64});
  CHECK_THROWS_AS(p.block_rows({2, 4, 0}), std::invalid_argument);
  CHECK_THROWS_AS(p.block_cols({2, 0, 4}), std::invalid_argument);
  CHECK_THROWS_AS(p.block_rows({5, 0, 0}), std::invalid_argument);
}

TEST_CASE("nodes at one level tile the index set") {
  const DyadicPartition p(64, 4);
  Index next = 0;
  for (Index i = 0; i < DyadicPartition::nodes_at(3); ++i) {
    const IndexRange r = p.block_rows({3, i, 0});
    CHECK(r.begin == next);
    next = r.end;
  }
  CHECK(next == 64);
}

TEST_CASE("blocks at every level tile the index square once") {
  const DyadicPartition p(64, 6);
  for (int level = 0; level <= p.levels(); ++level) {
    std::vector<int> hits(64 * 64, 0);
    for (Index i = 0; i < DyadicPartition::nodes_at(level); ++i) {
      for (Index j = 0; j < DyadicPartition::nodes_at(p.levels() - level); ++j) {
        const IndexRange r = p.block_rows({level, i, j});
        const IndexRange c = p.block_cols({level, i, j});
        for (Index a = r.begin; a < r.end; ++a)
          for (Index b = c.begin; b < c.end; ++b) ++hits[static_cast<std::size_t>(a * 64 + b)];
      }
    }
    for (int h : hits) REQUIRE(h == 1);
  }
}
