#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bfly/butterfly.hpp"
#include "bfly/kernels.hpp"

namespace bfly {

enum class KernelKind { kFio, kHankel, kComposition };

const char* to_string(KernelKind kind);
KernelKind parse_kernel(const std::string& name);

inline constexpr Index kDefaultSampleCount = 256;
// Rank of the inner FIO factorization used to build K F K.
inline constexpr Index kDefaultInnerRank = 12;

/// A kernel ready for factorization: an entry oracle for the FIO and Hankel
/// examples, an operator oracle (K F K through a factored K) for composition.
struct KernelInstance {
  KernelKind kind = KernelKind::kFio;
  Index n = 0;
  std::unique_ptr<EntryOracle> entries;
  std::shared_ptr<const ButterflyFactors> inner;
  std::unique_ptr<ComposedOperator> composed;
  std::unique_ptr<DenseOperator> dense_op;  // matvec access to an entry kernel

  /// Operator access when the mode needs it, entry access otherwise.
  MatrixOracle oracle(FactorMode mode) const;
  FactorMode default_mode() const {
    return kind == KernelKind::kComposition ? FactorMode::kMatvec : FactorMode::kSampling;
  }
};

struct KernelOptions {
  Index inner_rank = kDefaultInnerRank;
  Index target_leaf = kDefaultTargetLeaf;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  // Also build a dense operator for entry kernels (n <= kDenseCap) so they
  // can be factored in matvec mode.
  bool dense_operator = false;
};

KernelInstance make_kernel(KernelKind kind, Index n, const KernelOptions& opts);

/// Ground truth u^d evaluated at selected rows for input g.
using ReferenceRows = std::function<Vector(const Vector& g, std::span<const Index> rows)>;

ReferenceRows reference_from_entries(const EntryOracle& oracle);
ReferenceRows reference_from_operator(const OperatorOracle& op);
ReferenceRows reference_for(const KernelInstance& k);

struct EpsEstimate {
  double value = 0.0;
  bool absolute = false;  // reference vanished on S; value is the absolute error
  Index samples = 0;
  bool clamped = false;   // requested sample count exceeded N
  std::vector<Index> rows;
};

/// sqrt(sum |ua - ud|^2 / sum |ud|^2); absolute error when ud vanishes.
double relative_sample_error(const Vector& ua, const Vector& ud, bool* absolute = nullptr);

/// Relative error of the factored operator against `reference` on a random
/// row set S (without replacement) and one shared complex Gaussian input.
EpsEstimate estimate_eps_a(const ButterflyFactors& f, const ReferenceRows& reference, Index n,
                           Index sample_count, Rng& rng);

/// Relative Frobenius error ||K - K_bf||_F / ||K||_F against a dense matrix.
double dense_relative_error(const ButterflyFactors& f, const Matrix& k);

struct BenchConfig {
  KernelKind kernel = KernelKind::kFio;
  std::vector<Index> n_list;
  std::vector<Index> rank_list;
  std::optional<FactorMode> mode;  // kernel default when empty
  std::uint64_t seed = 0;
  Index sample_count = kDefaultSampleCount;
  Index target_leaf = kDefaultTargetLeaf;
  Index inner_rank = kDefaultInnerRank;
  unsigned threads = 1;
  int apply_repeats = 3;
  OversamplingParams params;
};

struct BenchRow {
  Index n = 0;
  Index r = 0;
  double eps_a = 0.0;
  double t_factor_s = 0.0;
  double t_dense_s = 0.0;
  double t_apply_s = 0.0;
  double speedup = 0.0;
  std::size_t nnz_total = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> notes;
  bool failed = false;
};

struct BenchReport {
  KernelKind kernel = KernelKind::kFio;
  FactorMode mode = FactorMode::kSampling;
  std::vector<BenchRow> rows;

  std::string to_json() const;
  std::string to_csv() const;
  bool any_failed() const;
};

BenchReport run_bench(const BenchConfig& cfg);

/// Seed of the sample set and input for one (n, r) bench row.
std::uint64_t row_seed(std::uint64_t master, Index n, Index r);

}  // namespace bfly
