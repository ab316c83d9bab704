#include "bfly/butterfly.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "bfly/parallel.hpp"

namespace bfly {

// ---------------------------------------------------------------------------
// Sparse factor primitives

std::size_t BlockDiagonalFactor::nnz() const {
  std::size_t total = 0;
  for (const auto& b : blocks) total += static_cast<std::size_t>(b.data.size());
  return total;
}

Matrix BlockDiagonalFactor::dense() const {
  Matrix out = Matrix::Zero(rows, cols);
  for (const auto& b : blocks) {
    out.block(b.row_offset, b.col_offset, b.data.rows(), b.data.cols()) = b.data;
  }
  return out;
}

Matrix BlockDiagonalFactor::apply(const Matrix& x) const {
  if (x.rows() != cols) throw std::invalid_argument("block-diagonal apply: length mismatch");
  Matrix y = Matrix::Zero(rows, x.cols());
  for (const auto& b : blocks) {
    y.middleRows(b.row_offset, b.data.rows()).noalias() +=
        b.data * x.middleRows(b.col_offset, b.data.cols());
  }
  return y;
}

Matrix BlockDiagonalFactor::apply_adjoint(const Matrix& x) const {
  if (x.rows() != rows) throw std::invalid_argument("block-diagonal adjoint: length mismatch");
  Matrix y = Matrix::Zero(cols, x.cols());
  for (const auto& b : blocks) {
    y.middleRows(b.col_offset, b.data.cols()).noalias() +=
        b.data.adjoint() * x.middleRows(b.row_offset, b.data.rows());
  }
  return y;
}

std::size_t TransferFactor::nnz() const {
  std::size_t total = 0;
  for (const auto& b : blocks) total += static_cast<std::size_t>(b.data.size());
  return total;
}

Matrix TransferFactor::dense() const {
  Matrix out = Matrix::Zero(rows, cols);
  for (const auto& b : blocks) {
    out.block(b.row_offset, b.col_offset, b.data.rows(), b.data.cols()) += b.data;
  }
  return out;
}

Matrix TransferFactor::apply(const Matrix& x) const {
  if (x.rows() != cols) throw std::invalid_argument("transfer apply: length mismatch");
  Matrix y = Matrix::Zero(rows, x.cols());
  for (const auto& b : blocks) {
    y.middleRows(b.row_offset, b.data.rows()).noalias() +=
        b.data * x.middleRows(b.col_offset, b.data.cols());
  }
  return y;
}

Matrix TransferFactor::apply_adjoint(const Matrix& x) const {
  if (x.rows() != rows) throw std::invalid_argument("transfer adjoint: length mismatch");
  Matrix y = Matrix::Zero(cols, x.cols());
  for (const auto& b : blocks) {
    y.middleRows(b.col_offset, b.data.cols()).noalias() +=
        b.data.adjoint() * x.middleRows(b.row_offset, b.data.rows());
  }
  return y;
}

MiddleFactor::MiddleFactor(Index m_, Index r_)
    : m(m_), r(r_), weights(static_cast<std::size_t>(m_ * m_), RealVector::Zero(r_)) {}

Matrix MiddleFactor::dense() const {
  Matrix out = Matrix::Zero(dim(), dim());
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      const RealVector& w = weight(i, j);
      for (Index k = 0; k < r; ++k) out(u_slot(i, j) + k, v_slot(i, j) + k) = w(k);
    }
  }
  return out;
}

Matrix MiddleFactor::apply(const Matrix& x) const {
  if (x.rows() != dim()) throw std::invalid_argument("middle apply: length mismatch");
  Matrix y(dim(), x.cols());
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      y.middleRows(u_slot(i, j), r) =
          weight(i, j).cast<Complex>().asDiagonal() * x.middleRows(v_slot(i, j), r);
    }
  }
  return y;
}

Matrix MiddleFactor::apply_adjoint(const Matrix& x) const {
  if (x.rows() != dim()) throw std::invalid_argument("middle adjoint: length mismatch");
  Matrix y(dim(), x.cols());
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      y.middleRows(v_slot(i, j), r) =
          weight(i, j).cast<Complex>().asDiagonal() * x.middleRows(u_slot(i, j), r);
    }
  }
  return y;
}

const char* to_string(FactorMode mode) {
  switch (mode) {
    case FactorMode::kSampling: return "sampling";
    case FactorMode::kMatvec: return "matvec";
    case FactorMode::kStreaming: return "streaming";
  }
  return "unknown";
}

FactorMode parse_factor_mode(const std::string& name) {
  if (name == "sampling") return FactorMode::kSampling;
  if (name == "matvec") return FactorMode::kMatvec;
  if (name == "streaming") return FactorMode::kStreaming;
  throw std::invalid_argument("unknown factorization mode '" + name + "'");
}

// ---------------------------------------------------------------------------
// Middle level

namespace {

struct MiddlePieces {
  Matrix u;       // U^h_{i,j}: b x r
  RealVector s;   // S^h_{i,j}
  Matrix v;       // V^h_{j,i}: b x r
};

MiddlePieces split_form_a(const LowRankApprox& a) {
  FactorFormA f = to_form_a(a);
  return {std::move(f.u), std::move(f.s), f.vstar.adjoint()};
}

Index middle_block_size(const DyadicPartition& p) { return p.n() / p.middle_count(); }

void check_rank_fits(const DyadicPartition& p, Index r, Index width) {
  if (r < 1) throw std::invalid_argument("rank must be >= 1");
  if (width > middle_block_size(p)) {
    throw std::invalid_argument("middle blocks of size " + std::to_string(middle_block_size(p)) +
                                " cannot hold " + std::to_string(width) + " probe columns");
  }
}

// Column block j of a diagonal block built from per-(node, j) pieces.
BlockDiagonalFactor make_middle_diagonal(const DyadicPartition& p, Index r) {
  const Index m = p.middle_count();
  const Index b = middle_block_size(p);
  BlockDiagonalFactor out;
  out.rows = p.n();
  out.cols = m * m * r;
  out.blocks.resize(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    out.blocks[static_cast<std::size_t>(i)] = {i * b, i * m * r, Matrix::Zero(b, m * r)};
  }
  return out;
}

template <typename ApproxFn>
MiddleLevel assemble_middle(const DyadicPartition& p, Index r, unsigned threads,
                            ApproxFn&& approx) {
  const Index m = p.middle_count();
  std::vector<MiddlePieces> pieces(static_cast<std::size_t>(m * m));
  parallel_for(pieces.size(), threads, [&](std::size_t k) {
    const Index i = static_cast<Index>(k) / m;
    const Index j = static_cast<Index>(k) % m;
    pieces[k] = split_form_a(approx(i, j));
  });
  MiddleLevel out;
  out.u_h = make_middle_diagonal(p, r);
  out.v_h = make_middle_diagonal(p, r);
  out.middle = MiddleFactor(m, r);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      MiddlePieces& pc = pieces[static_cast<std::size_t>(i * m + j)];
      out.u_h.blocks[static_cast<std::size_t>(i)].data.middleCols(j * r, r) = pc.u;
      out.v_h.blocks[static_cast<std::size_t>(j)].data.middleCols(i * r, r) = pc.v;
      out.middle.weight(i, j) = std::move(pc.s);
    }
  }
  return out;
}

}  // namespace

LowRankApprox middle_block_sampling(const EntryOracle& oracle, const DyadicPartition& p, Index i,
                                    Index j, Index r, const FactorizeOptions& opts) {
  const int h = p.half();
  const IndexRange rows = p.block_rows({h, i, j});
  const IndexRange cols = p.block_cols({h, i, j});
  SubmatrixFn entries = [&](std::span<const Index> local_rows, std::span<const Index> local_cols) {
    std::vector<Index> gr(local_rows.begin(), local_rows.end());
    std::vector<Index> gc(local_cols.begin(), local_cols.end());
    for (auto& v : gr) v += rows.begin;
    for (auto& v : gc) v += cols.begin;
    return oracle.submatrix(gr, gc);
  };
  Rng rng = make_substream(opts.seed, StreamTag::kMiddleBlock, static_cast<std::uint64_t>(i),
                           static_cast<std::uint64_t>(j));
  try {
    return randomized_sampling_svd(entries, rows.size(), cols.size(), r, opts.params, rng);
  } catch (const std::exception& e) {
    throw std::runtime_error("middle block (" + std::to_string(h) + ", " + std::to_string(i) +
                             ", " + std::to_string(j) + "): " + e.what());
  }
}

Matrix make_block_probe(const DyadicPartition& p, Index width, std::uint64_t seed,
                        StreamTag tag) {
  const Index m = p.middle_count();
  const Index b = middle_block_size(p);
  Matrix probe = Matrix::Zero(p.n(), m * width);
  for (Index j = 0; j < m; ++j) {
    Rng rng = make_substream(seed, tag, static_cast<std::uint64_t>(j));
    probe.block(j * b, j * width, b, width) = complex_gaussian(b, width, rng);
  }
  return probe;
}

MiddleLevel middle_factorization_sampling(const EntryOracle& oracle, const DyadicPartition& p,
                                          Index r, const FactorizeOptions& opts) {
  if (oracle.size() != p.n()) throw std::invalid_argument("oracle size does not match partition");
  opts.params.validate();
  check_rank_fits(p, r, r);
  return assemble_middle(p, r, opts.threads, [&](Index i, Index j) {
    return middle_block_sampling(oracle, p, i, j, r, opts);
  });
}

MiddleLevel middle_factorization_matvec(const OperatorOracle& op, const DyadicPartition& p,
                                        Index r, const FactorizeOptions& opts) {
  if (op.size() != p.n()) throw std::invalid_argument("oracle size does not match partition");
  opts.params.validate();
  const Index width = r + opts.params.p;
  check_rank_fits(p, r, width);
  const Index b = middle_block_size(p);

  const Matrix probe_col = make_block_probe(p, width, opts.seed, StreamTag::kProbeCol);
  const Matrix probe_row = make_block_probe(p, width, opts.seed, StreamTag::kProbeRow);
  const Matrix y = op.apply(probe_col);
  const Matrix w = op.apply_adjoint(probe_row);
  if (y.rows() != p.n() || y.cols() != probe_col.cols() || w.rows() != p.n() ||
      w.cols() != probe_row.cols()) {
    throw std::runtime_error("operator oracle returned a block of the wrong shape");
  }
  return assemble_middle(p, r, opts.threads, [&](Index i, Index j) {
    // y(A_i, block j) = K^h_{i,j} C_jj;  w(B_j, block i) = (K^h_{i,j})^* R_ii.
    return randomized_svd_from_sketches(y.block(i * b, j * width, b, width),
                                        w.block(j * b, i * width, b, width),
                                        probe_row.block(i * b, i * width, b, width), r);
  });
}

MiddleLevel middle_factorization_dense(const EntryOracle& oracle, const DyadicPartition& p,
                                       Index r, unsigned threads) {
  if (oracle.size() != p.n()) throw std::invalid_argument("oracle size does not match partition");
  check_rank_fits(p, r, r);
  return assemble_middle(p, r, threads, [&](Index i, Index j) {
    const int h = p.half();
    const IndexRange rows = p.block_rows({h, i, j});
    const IndexRange cols = p.block_cols({h, i, j});
    std::vector<Index> gr(static_cast<std::size_t>(rows.size()));
    std::vector<Index> gc(static_cast<std::size_t>(cols.size()));
    std::iota(gr.begin(), gr.end(), rows.begin);
    std::iota(gc.begin(), gc.end(), cols.begin);
    return truncated_svd(oracle.submatrix(gr, gc), r);
  });
}

// ---------------------------------------------------------------------------
// Recursive factorization

namespace {

struct SubtreeFactors {
  std::vector<PlacedBlock> leaves;
  std::vector<std::vector<PlacedBlock>> transfers;  // indexed by level - h
};

// Factors the diagonal block `top` of U^h (node `node` at level h) down to
// the leaves. Each step splits a block into top and bottom halves and
// compresses every adjacent column pair at rank r, singular values kept on
// the left factor.
SubtreeFactors factor_subtree(const Matrix& top, Index node, const DyadicPartition& p, Index r) {
  const int levels = p.levels();
  const int h = p.half();
  SubtreeFactors out;
  out.transfers.resize(static_cast<std::size_t>(levels - h));
  std::vector<Matrix> current{top};
  for (int level = h; level < levels; ++level) {
    const Index groups = static_cast<Index>(current.size());
    const Index col_blocks = Index{1} << (levels - level);
    const Index half_cols = col_blocks / 2;
    const Index rows = p.n() >> level;
    const Index half_rows = rows / 2;
    std::vector<Matrix> next(static_cast<std::size_t>(2 * groups));
    auto& placed = out.transfers[static_cast<std::size_t>(level - h)];
    placed.reserve(static_cast<std::size_t>(2 * groups * half_cols));
    for (Index a = 0; a < groups; ++a) {
      const Matrix& blk = current[static_cast<std::size_t>(a)];
      if (blk.rows() != rows || blk.cols() != col_blocks * r) {
        throw std::logic_error("recursive factorization: block shape mismatch at level " +
                               std::to_string(level));
      }
      const Index group = node * groups + a;
      for (Index side = 0; side < 2; ++side) {
        const Index child = 2 * group + side;
        Matrix& child_block = next[static_cast<std::size_t>(2 * a + side)];
        child_block.resize(half_rows, half_cols * r);
        for (Index j = 0; j < half_cols; ++j) {
          const Matrix pair = blk.block(side * half_rows, 2 * j * r, half_rows, 2 * r);
          FactorFormUV f = to_form_scaled_u(truncated_svd_padded(pair, r));
          child_block.middleCols(j * r, r) = f.u;
          placed.push_back({(child * half_cols + j) * r, (group * col_blocks + 2 * j) * r,
                            std::move(f.vstar)});
        }
      }
    }
    current = std::move(next);
  }
  const Index leaf = p.leaf_size();
  const Index per_node = static_cast<Index>(current.size());
  out.leaves.reserve(current.size());
  for (Index a = 0; a < per_node; ++a) {
    const Index global = node * per_node + a;
    out.leaves.push_back({global * leaf, global * r, std::move(current[static_cast<std::size_t>(a)])});
  }
  return out;
}

struct ChainAssembly {
  BlockDiagonalFactor outer;
  std::vector<TransferFactor> by_level;  // index level - h
};

ChainAssembly start_assembly(const DyadicPartition& p, Index r) {
  ChainAssembly a;
  const Index width = (Index{1} << p.levels()) * r;
  a.outer.rows = p.n();
  a.outer.cols = width;
  for (int level = p.half(); level < p.levels(); ++level) {
    TransferFactor t;
    t.level = level;
    t.rows = width;
    t.cols = width;
    a.by_level.push_back(std::move(t));
  }
  return a;
}

void append_subtree(ChainAssembly& a, SubtreeFactors&& s) {
  for (auto& leaf : s.leaves) a.outer.blocks.push_back(std::move(leaf));
  for (std::size_t k = 0; k < s.transfers.size(); ++k) {
    auto& dst = a.by_level[k].blocks;
    for (auto& b : s.transfers[k]) dst.push_back(std::move(b));
  }
}

void check_middle_diagonal(const BlockDiagonalFactor& d, const DyadicPartition& p, Index r) {
  const Index m = p.middle_count();
  if (static_cast<Index>(d.blocks.size()) != m || d.rows != p.n() || d.cols != m * m * r) {
    throw std::logic_error("middle-level factor does not match partition and rank");
  }
}

ChainAssembly factor_all(const BlockDiagonalFactor& d, const DyadicPartition& p, Index r,
                         unsigned threads) {
  check_middle_diagonal(d, p, r);
  const Index m = p.middle_count();
  std::vector<SubtreeFactors> parts(static_cast<std::size_t>(m));
  parallel_for(parts.size(), threads, [&](std::size_t i) {
    parts[i] = factor_subtree(d.blocks[i].data, static_cast<Index>(i), p, r);
  });
  ChainAssembly a = start_assembly(p, r);
  for (auto& part : parts) append_subtree(a, std::move(part));
  return a;
}

RecursiveFactors finish_u(ChainAssembly&& a) {
  RecursiveFactors out;
  out.outer = std::move(a.outer);
  for (auto it = a.by_level.rbegin(); it != a.by_level.rend(); ++it) {
    out.chain.push_back(std::move(*it));
  }
  return out;
}

RecursiveFactors finish_v(ChainAssembly&& a) {
  return {std::move(a.outer), std::move(a.by_level)};
}

}  // namespace

RecursiveFactors recursive_factor_u(const BlockDiagonalFactor& u_h, const DyadicPartition& p,
                                    Index r, unsigned threads) {
  return finish_u(factor_all(u_h, p, r, threads));
}

RecursiveFactors recursive_factor_v(const BlockDiagonalFactor& v_h, const DyadicPartition& p,
                                    Index r, unsigned threads) {
  return finish_v(factor_all(v_h, p, r, threads));
}

// ---------------------------------------------------------------------------
// Full pipeline

namespace {

ButterflyFactors assemble(const DyadicPartition& p, Index r, RecursiveFactors&& u,
                          MiddleFactor&& middle, RecursiveFactors&& v) {
  ButterflyFactors f;
  f.partition = p;
  f.rank = r;
  f.u_outer = std::move(u.outer);
  f.g_chain = std::move(u.chain);
  f.middle = std::move(middle);
  f.h_chain = std::move(v.chain);
  f.v_outer = std::move(v.outer);
  return f;
}

// Builds and factors one diagonal block of U^h (pass over j) or V^h (pass
// over i) at a time. Each middle block is recomputed from its own substream,
// so the result is identical to the two-stage schedule.
ButterflyFactors factorize_streaming(const EntryOracle& oracle, const DyadicPartition& p, Index r,
                                     const FactorizeOptions& opts) {
  if (oracle.size() != p.n()) throw std::invalid_argument("oracle size does not match partition");
  opts.params.validate();
  check_rank_fits(p, r, r);
  const Index m = p.middle_count();
  const Index b = middle_block_size(p);
  MiddleFactor middle(m, r);

  std::vector<SubtreeFactors> u_parts(static_cast<std::size_t>(m));
  parallel_for(u_parts.size(), opts.threads, [&](std::size_t k) {
    const Index i = static_cast<Index>(k);
    Matrix u_i(b, m * r);
    for (Index j = 0; j < m; ++j) {
      MiddlePieces pc = split_form_a(middle_block_sampling(oracle, p, i, j, r, opts));
      u_i.middleCols(j * r, r) = pc.u;
      middle.weight(i, j) = std::move(pc.s);
    }
    u_parts[k] = factor_subtree(u_i, i, p, r);
  });

  std::vector<SubtreeFactors> v_parts(static_cast<std::size_t>(m));
  parallel_for(v_parts.size(), opts.threads, [&](std::size_t k) {
    const Index j = static_cast<Index>(k);
    Matrix v_j(b, m * r);
    for (Index i = 0; i < m; ++i) {
      MiddlePieces pc = split_form_a(middle_block_sampling(oracle, p, i, j, r, opts));
      v_j.middleCols(i * r, r) = pc.v;
    }
    v_parts[k] = factor_subtree(v_j, j, p, r);
  });

  ChainAssembly ua = start_assembly(p, r);
  for (auto& part : u_parts) append_subtree(ua, std::move(part));
  ChainAssembly va = start_assembly(p, r);
  for (auto& part : v_parts) append_subtree(va, std::move(part));
  return assemble(p, r, finish_u(std::move(ua)), std::move(middle), finish_v(std::move(va)));
}

}  // namespace

ButterflyFactors factorize(const MatrixOracle& oracle, const DyadicPartition& p, Index r,
                           FactorMode mode, const FactorizeOptions& opts) {
  MiddleLevel mid;
  switch (mode) {
    case FactorMode::kStreaming:
      if (!oracle.has_entries()) {
        throw std::invalid_argument("streaming mode requires an entry oracle");
      }
      return factorize_streaming(oracle.entry_oracle(), p, r, opts);
    case FactorMode::kSampling:
      if (!oracle.has_entries()) {
        throw std::invalid_argument("sampling mode requires an entry oracle");
      }
      mid = middle_factorization_sampling(oracle.entry_oracle(), p, r, opts);
      break;
    case FactorMode::kMatvec:
      if (!oracle.has_operator()) {
        throw std::invalid_argument("matvec mode requires an operator oracle");
      }
      mid = middle_factorization_matvec(oracle.operator_oracle(), p, r, opts);
      break;
  }
  RecursiveFactors u = recursive_factor_u(mid.u_h, p, r, opts.threads);
  mid.u_h = {};
  RecursiveFactors v = recursive_factor_v(mid.v_h, p, r, opts.threads);
  return assemble(p, r, std::move(u), std::move(mid.middle), std::move(v));
}

std::vector<std::pair<Index, Index>> transfer_layout(const DyadicPartition& p, Index r,
                                                     int level) {
  if (level < p.half() || level >= p.levels()) {
    throw std::invalid_argument("transfer level out of range");
  }
  const Index col_blocks = Index{1} << (p.levels() - level);
  const Index half_cols = col_blocks / 2;
  std::vector<std::pair<Index, Index>> out;
  for (Index group = 0; group < DyadicPartition::nodes_at(level); ++group) {
    for (Index side = 0; side < 2; ++side) {
      for (Index j = 0; j < half_cols; ++j) {
        out.emplace_back(((2 * group + side) * half_cols + j) * r,
                         (group * col_blocks + 2 * j) * r);
      }
    }
  }
  return out;
}

ButterflyFactors make_random_butterfly(const DyadicPartition& p, Index r, std::uint64_t seed) {
  Rng rng(seed);
  const Index width = (Index{1} << p.levels()) * r;
  const Index leaf = p.leaf_size();
  auto outer = [&] {
    BlockDiagonalFactor d;
    d.rows = p.n();
    d.cols = width;
    for (Index k = 0; k < (Index{1} << p.levels()); ++k) {
      d.blocks.push_back({k * leaf, k * r, complex_gaussian(leaf, r, rng)});
    }
    return d;
  };
  auto transfer = [&](int level) {
    TransferFactor t;
    t.level = level;
    t.rows = width;
    t.cols = width;
    const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(r));
    for (const auto& [ro, co] : transfer_layout(p, r, level)) {
      t.blocks.push_back({ro, co, complex_gaussian(r, 2 * r, rng) * scale});
    }
    return t;
  };
  ButterflyFactors f;
  f.partition = p;
  f.rank = r;
  f.u_outer = outer();
  for (int level = p.levels() - 1; level >= p.half(); --level) f.g_chain.push_back(transfer(level));
  f.middle = MiddleFactor(p.middle_count(), r);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  for (auto& w : f.middle.weights) {
    for (Index k = 0; k < r; ++k) w(k) = weight(rng);
  }
  for (int level = p.half(); level < p.levels(); ++level) f.h_chain.push_back(transfer(level));
  f.v_outer = outer();
  return f;
}

// ---------------------------------------------------------------------------
// Application

Matrix apply(const ButterflyFactors& f, const Matrix& g) {
  if (g.rows() != f.n()) {
    throw std::invalid_argument("apply: input length " + std::to_string(g.rows()) +
                                " does not match N = " + std::to_string(f.n()));
  }
  Matrix x = f.v_outer.apply_adjoint(g);
  for (auto it = f.h_chain.rbegin(); it != f.h_chain.rend(); ++it) x = it->apply_adjoint(x);
  x = f.middle.apply(x);
  for (auto it = f.g_chain.rbegin(); it != f.g_chain.rend(); ++it) x = it->apply(x);
  return f.u_outer.apply(x);
}

Matrix apply_adjoint(const ButterflyFactors& f, const Matrix& g) {
  if (g.rows() != f.n()) {
    throw std::invalid_argument("apply_adjoint: input length " + std::to_string(g.rows()) +
                                " does not match N = " + std::to_string(f.n()));
  }
  Matrix x = f.u_outer.apply_adjoint(g);
  for (const auto& t : f.g_chain) x = t.apply_adjoint(x);
  x = f.middle.apply_adjoint(x);
  for (const auto& t : f.h_chain) x = t.apply(x);
  return f.v_outer.apply(x);
}

Vector apply(const ButterflyFactors& f, const Vector& g) {
  return bfly::apply(f, Matrix(g)).col(0);
}

Vector apply_adjoint(const ButterflyFactors& f, const Vector& g) {
  return bfly::apply_adjoint(f, Matrix(g)).col(0);
}

Matrix to_dense(const ButterflyFactors& f) {
  return bfly::apply(f, Matrix(Matrix::Identity(f.n(), f.n())));
}

std::size_t NnzReport::total() const {
  std::size_t t = u_outer + middle + v_outer;
  for (auto c : g_chain) t += c;
  for (auto c : h_chain) t += c;
  return t;
}

NnzReport nnz_report(const ButterflyFactors& f) {
  NnzReport r;
  r.u_outer = f.u_outer.nnz();
  for (const auto& t : f.g_chain) r.g_chain.push_back(t.nnz());
  r.middle = f.middle.nnz();
  for (const auto& t : f.h_chain) r.h_chain.push_back(t.nnz());
  r.v_outer = f.v_outer.nnz();
  return r;
}

}  // namespace bfly
