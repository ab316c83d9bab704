#pragma once

#include <cstdint>
#include <vector>

#include "bfly/lowrank.hpp"
#include "bfly/oracle.hpp"
#include "bfly/partition.hpp"

namespace bfly {

/// Dense block placed at (row_offset, col_offset) inside a sparse factor.
struct PlacedBlock {
  Index row_offset = 0;
  Index col_offset = 0;
  Matrix data;
};

/// Block-diagonal factor (U^l or V^l). Consecutive blocks tile rows and
/// columns contiguously.
struct BlockDiagonalFactor {
  Index rows = 0;
  Index cols = 0;
  std::vector<PlacedBlock> blocks;

  std::size_t nnz() const;
  Matrix dense() const;
  Matrix apply(const Matrix& x) const;
  Matrix apply_adjoint(const Matrix& x) const;
};

/// Transfer factor G^l (U side) or H^l (V side): one r x 2r block per
/// (child node, column pair). Within diagonal group i the top half holds the
/// blocks of child 2i and the bottom half those of child 2i+1.
struct TransferFactor {
  int level = 0;
  Index rows = 0;
  Index cols = 0;
  std::vector<PlacedBlock> blocks;

  std::size_t nnz() const;
  Matrix dense() const;
  Matrix apply(const Matrix& x) const;
  Matrix apply_adjoint(const Matrix& x) const;
};

/// M^h: for every (i, j) a diagonal weight block S^h_{i,j} mapping the V-side
/// column slot (j*m + i)*r to the U-side slot (i*m + j)*r.
struct MiddleFactor {
  Index m = 0;
  Index r = 0;
  std::vector<RealVector> weights;  // row-major over (i, j)

  MiddleFactor() = default;
  MiddleFactor(Index m, Index r);

  RealVector& weight(Index i, Index j) { return weights[static_cast<std::size_t>(i * m + j)]; }
  const RealVector& weight(Index i, Index j) const {
    return weights[static_cast<std::size_t>(i * m + j)];
  }
  Index dim() const { return m * m * r; }
  Index u_slot(Index i, Index j) const { return (i * m + j) * r; }
  Index v_slot(Index i, Index j) const { return (j * m + i) * r; }

  std::size_t nnz() const { return static_cast<std::size_t>(m * m * r); }
  Matrix dense() const;
  Matrix apply(const Matrix& x) const;
  Matrix apply_adjoint(const Matrix& x) const;
};

/// K ~ U^L G^{L-1} ... G^h M^h (H^h)^* ... (H^{L-1})^* (V^L)^*.
struct ButterflyFactors {
  DyadicPartition partition{4, 2};
  Index rank = 0;
  BlockDiagonalFactor u_outer;
  std::vector<TransferFactor> g_chain;  // levels L-1, L-2, ..., h
  MiddleFactor middle;
  std::vector<TransferFactor> h_chain;  // levels h, h+1, ..., L-1
  BlockDiagonalFactor v_outer;

  Index n() const { return partition.n(); }
};

/// Output of the middle level factorization K ~ U^h M^h (V^h)^*.
struct MiddleLevel {
  BlockDiagonalFactor u_h;
  MiddleFactor middle;
  BlockDiagonalFactor v_h;
};

enum class FactorMode { kSampling, kMatvec, kStreaming };

const char* to_string(FactorMode mode);
FactorMode parse_factor_mode(const std::string& name);

struct FactorizeOptions {
  OversamplingParams params;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Rank-r approximation of the middle block K^h_{i,j} by randomized
/// sampling, using the substream reserved for (i, j).
LowRankApprox middle_block_sampling(const EntryOracle& oracle, const DyadicPartition& p, Index i,
                                    Index j, Index r, const FactorizeOptions& opts);

/// Block-diagonal Gaussian probe of shape N x (m * width); diagonal block j
/// is drawn from its own substream.
Matrix make_block_probe(const DyadicPartition& p, Index width, std::uint64_t seed,
                        StreamTag tag);

MiddleLevel middle_factorization_sampling(const EntryOracle& oracle, const DyadicPartition& p,
                                          Index r, const FactorizeOptions& opts);
MiddleLevel middle_factorization_matvec(const OperatorOracle& op, const DyadicPartition& p,
                                        Index r, const FactorizeOptions& opts);
/// Middle level from exact truncated SVDs of dense blocks. Reference path
/// for tests and small problems.
MiddleLevel middle_factorization_dense(const EntryOracle& oracle, const DyadicPartition& p,
                                       Index r, unsigned threads = 1);

struct RecursiveFactors {
  BlockDiagonalFactor outer;            // U^L (or V^L)
  std::vector<TransferFactor> chain;    // ordered by level as requested
};

/// U^h ~ U^L G^{L-1} ... G^h; chain returned in order L-1, ..., h.
RecursiveFactors recursive_factor_u(const BlockDiagonalFactor& u_h, const DyadicPartition& p,
                                    Index r, unsigned threads = 1);
/// V^h ~ V^L H^{L-1} ... H^h; chain returned in order h, ..., L-1.
RecursiveFactors recursive_factor_v(const BlockDiagonalFactor& v_h, const DyadicPartition& p,
                                    Index r, unsigned threads = 1);

ButterflyFactors factorize(const MatrixOracle& oracle, const DyadicPartition& p, Index r,
                           FactorMode mode, const FactorizeOptions& opts);

/// Block offsets of the transfer factor at `level` (h <= level < L), in
/// storage order.
std::vector<std::pair<Index, Index>> transfer_layout(const DyadicPartition& p, Index r,
                                                     int level);

/// Random factors with the exact butterfly layout; every complementary block
/// of the product has rank <= r.
ButterflyFactors make_random_butterfly(const DyadicPartition& p, Index r, std::uint64_t seed);

Matrix apply(const ButterflyFactors& f, const Matrix& g);
Matrix apply_adjoint(const ButterflyFactors& f, const Matrix& g);
Vector apply(const ButterflyFactors& f, const Vector& g);
Vector apply_adjoint(const ButterflyFactors& f, const Vector& g);

/// Dense N x N matrix represented by the factors.
Matrix to_dense(const ButterflyFactors& f);

struct NnzReport {
  std::size_t u_outer = 0;
  std::vector<std::size_t> g_chain;
  std::size_t middle = 0;
  std::vector<std::size_t> h_chain;
  std::size_t v_outer = 0;

  std::size_t total() const;
};

NnzReport nnz_report(const ButterflyFactors& f);

/// A factorization used as an operator oracle.
class ButterflyOperator final : public OperatorOracle {
 public:
  explicit ButterflyOperator(const ButterflyFactors& f) : f_(&f) {}

  Index size() const override { return f_->n(); }
  Matrix apply(const Matrix& x) const override { return bfly::apply(*f_, x); }
  Matrix apply_adjoint(const Matrix& x) const override { return bfly::apply_adjoint(*f_, x); }

 private:
  const ButterflyFactors* f_;
};

}  // namespace bfly
