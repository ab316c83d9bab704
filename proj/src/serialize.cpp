#include "bfly/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace bfly {

namespace {

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void complex(const Complex& c) {
    f64(c.real());
    f64(c.imag());
  }
  void raw(const char* s, std::size_t n) { bytes_.insert(bytes_.end(), s, s + n); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int k = 0; k < n; ++k) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }

  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& b) : bytes_(b) {}

  std::uint64_t offset() const { return pos_; }
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  Complex complex() {
    const double re = f64();
    const double im = f64();
    return {re, im};
  }
  void expect_bytes(std::uint64_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("truncated file", bytes_.size());
  }
  bool at_end() const { return pos_ == bytes_.size(); }
  [[noreturn]] void fail(const std::string& what, std::uint64_t at) const {
    throw FormatError(what, at);
  }

 private:
  std::uint64_t get(int n) {
    if (bytes_.size() - pos_ < static_cast<std::size_t>(n)) {
      throw FormatError("truncated file", bytes_.size());
    }
    std::uint64_t v = 0;
    for (int k = 0; k < n; ++k) v |= std::uint64_t{bytes_[pos_ + k]} << (8 * k);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

void write_dense_blocks(Writer& w, FactorKind kind, int level,
                        const std::vector<PlacedBlock>& blocks) {
  w.u8(static_cast<std::uint8_t>(kind));
  w.u32(static_cast<std::uint32_t>(level));
  w.u64(blocks.size());
  for (const auto& b : blocks) {
    w.u64(static_cast<std::uint64_t>(b.row_offset));
    w.u64(static_cast<std::uint64_t>(b.col_offset));
    w.u32(static_cast<std::uint32_t>(b.data.rows()));
    w.u32(static_cast<std::uint32_t>(b.data.cols()));
    for (Index c = 0; c < b.data.cols(); ++c) {
      for (Index r = 0; r < b.data.rows(); ++r) w.complex(b.data(r, c));
    }
  }
}

struct FactorHeader {
  FactorKind kind;
  int level;
  std::uint64_t count;
};

FactorHeader read_factor_header(Reader& rd, FactorKind expected, int expected_level) {
  const std::uint64_t at = rd.offset();
  const auto kind = rd.u8();
  if (kind != static_cast<std::uint8_t>(expected)) {
    rd.fail("unexpected factor kind " + std::to_string(kind), at);
  }
  const std::uint64_t level_at = rd.offset();
  const auto level = static_cast<int>(rd.u32());
  if (level != expected_level) rd.fail("unexpected factor level " + std::to_string(level), level_at);
  return {static_cast<FactorKind>(kind), level, rd.u64()};
}

std::vector<PlacedBlock> read_dense_blocks(Reader& rd, std::uint64_t count, Index max_rows,
                                           Index max_cols) {
  std::vector<PlacedBlock> blocks;
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::uint64_t at = rd.offset();
    PlacedBlock b;
    b.row_offset = static_cast<Index>(rd.u64());
    b.col_offset = static_cast<Index>(rd.u64());
    const Index rows = rd.u32();
    const Index cols = rd.u32();
    if (b.row_offset < 0 || b.col_offset < 0 || b.row_offset + rows > max_rows ||
        b.col_offset + cols > max_cols) {
      rd.fail("block outside factor bounds", at);
    }
    rd.expect_bytes(static_cast<std::uint64_t>(rows * cols) * 16);
    b.data.resize(rows, cols);
    for (Index c = 0; c < cols; ++c) {
      for (Index r = 0; r < rows; ++r) b.data(r, c) = rd.complex();
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

}  // namespace

std::vector<std::uint8_t> encode_factors(const ButterflyFactors& f) {
  const DyadicPartition& p = f.partition;
  Writer w;
  w.raw("BFAC", 4);
  w.u32(kFactorFormatVersion);
  w.u64(static_cast<std::uint64_t>(p.n()));
  w.u32(static_cast<std::uint32_t>(p.levels()));
  w.u32(static_cast<std::uint32_t>(f.rank));
  w.u32(static_cast<std::uint32_t>(3 + f.g_chain.size() + f.h_chain.size()));

  write_dense_blocks(w, FactorKind::kUOuter, p.levels(), f.u_outer.blocks);
  for (const auto& t : f.g_chain) write_dense_blocks(w, FactorKind::kG, t.level, t.blocks);

  const MiddleFactor& mid = f.middle;
  w.u8(static_cast<std::uint8_t>(FactorKind::kMiddle));
  w.u32(static_cast<std::uint32_t>(p.half()));
  w.u64(static_cast<std::uint64_t>(mid.m * mid.m));
  for (Index i = 0; i < mid.m; ++i) {
    for (Index j = 0; j < mid.m; ++j) {
      w.u64(static_cast<std::uint64_t>(mid.u_slot(i, j)));
      w.u64(static_cast<std::uint64_t>(mid.v_slot(i, j)));
      w.u32(static_cast<std::uint32_t>(mid.r));
      w.u32(static_cast<std::uint32_t>(mid.r));
      for (Index k = 0; k < mid.r; ++k) w.f64(mid.weight(i, j)(k));
    }
  }

  for (const auto& t : f.h_chain) write_dense_blocks(w, FactorKind::kH, t.level, t.blocks);
  write_dense_blocks(w, FactorKind::kVOuter, p.levels(), f.v_outer.blocks);
  return w.take();
}

ButterflyFactors decode_factors(const std::vector<std::uint8_t>& bytes) {
  Reader rd(bytes);
  rd.expect_bytes(4);
  if (std::memcmp(bytes.data(), "BFAC", 4) != 0) rd.fail("bad magic", 0);
  for (int k = 0; k < 4; ++k) rd.u8();
  const std::uint64_t version_at = rd.offset();
  const std::uint32_t version = rd.u32();
  if (version != kFactorFormatVersion) {
    rd.fail("unsupported format version " + std::to_string(version), version_at);
  }
  const std::uint64_t shape_at = rd.offset();
  const auto n = static_cast<Index>(rd.u64());
  const auto levels = static_cast<int>(rd.u32());
  const auto rank = static_cast<Index>(rd.u32());
  const std::uint64_t count_at = rd.offset();
  const std::uint32_t factor_count = rd.u32();

  ButterflyFactors f;
  try {
    f.partition = DyadicPartition(n, levels);
  } catch (const std::invalid_argument& e) {
    rd.fail(e.what(), shape_at);
  }
  if (rank < 1) rd.fail("rank must be positive", shape_at);
  f.rank = rank;
  const DyadicPartition& p = f.partition;
  const int h = p.half();
  if (factor_count != static_cast<std::uint32_t>(levels + 3)) {
    rd.fail("factor count " + std::to_string(factor_count) + " does not match depth", count_at);
  }
  const Index width = (Index{1} << levels) * rank;

  auto outer = [&](FactorKind kind) {
    const FactorHeader hd = read_factor_header(rd, kind, levels);
    BlockDiagonalFactor d;
    d.rows = n;
    d.cols = width;
    d.blocks = read_dense_blocks(rd, hd.count, n, width);
    return d;
  };
  auto transfer = [&](FactorKind kind, int level) {
    const FactorHeader hd = read_factor_header(rd, kind, level);
    TransferFactor t;
    t.level = level;
    t.rows = width;
    t.cols = width;
    t.blocks = read_dense_blocks(rd, hd.count, width, width);
    return t;
  };

  f.u_outer = outer(FactorKind::kUOuter);
  for (int level = levels - 1; level >= h; --level) f.g_chain.push_back(transfer(FactorKind::kG, level));

  const FactorHeader mh = read_factor_header(rd, FactorKind::kMiddle, h);
  const Index m = p.middle_count();
  if (mh.count != static_cast<std::uint64_t>(m * m)) {
    rd.fail("middle factor block count mismatch", rd.offset() - 8);
  }
  f.middle = MiddleFactor(m, rank);
  for (std::uint64_t k = 0; k < mh.count; ++k) {
    const std::uint64_t at = rd.offset();
    const auto ro = static_cast<Index>(rd.u64());
    const auto co = static_cast<Index>(rd.u64());
    const Index rows = rd.u32();
    const Index cols = rd.u32();
    if (rows != rank || cols != rank || ro % rank != 0 || ro < 0 || ro >= m * m * rank) {
      rd.fail("malformed middle block", at);
    }
    const Index slot = ro / rank;
    const Index i = slot / m;
    const Index j = slot % m;
    if (co != f.middle.v_slot(i, j)) rd.fail("middle block is not a permutation", at);
    for (Index t = 0; t < rank; ++t) f.middle.weight(i, j)(t) = rd.f64();
  }

  for (int level = h; level < levels; ++level) f.h_chain.push_back(transfer(FactorKind::kH, level));
  f.v_outer = outer(FactorKind::kVOuter);
  if (!rd.at_end()) rd.fail("trailing bytes", rd.offset());
  return f;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

void save_factors(const ButterflyFactors& f, const std::string& path) {
  write_file(path, encode_factors(f));
}

ButterflyFactors load_factors(const std::string& path) { return decode_factors(read_file(path)); }

void save_vector(const Vector& v, const std::string& path) {
  Writer w;
  w.u64(static_cast<std::uint64_t>(v.size()));
  for (Index k = 0; k < v.size(); ++k) w.complex(v(k));
  write_file(path, w.take());
}

Vector load_vector(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  Reader rd(bytes);
  const std::uint64_t n = rd.u64();
  if ((bytes.size() - 8) / 16 < n) throw FormatError("truncated vector", bytes.size());
  Vector v(static_cast<Index>(n));
  for (Index k = 0; k < v.size(); ++k) v(k) = rd.complex();
  if (!rd.at_end()) throw FormatError("trailing bytes", rd.offset());
  return v;
}

}  // namespace bfly
