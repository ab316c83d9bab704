#pragma once

#include <span>
#include <stdexcept>

#include "bfly/types.hpp"

namespace bfly {

/// Access to individual entries of a square N x N matrix.
///
/// Implementations must be safe to call concurrently.
class EntryOracle {
 public:
  virtual ~EntryOracle() = default;

  virtual Index size() const = 0;
  virtual Complex entry(Index i, Index j) const = 0;

  /// K(rows, cols). The default evaluates entry() one by one.
  virtual Matrix submatrix(std::span<const Index> rows, std::span<const Index> cols) const;
};

/// Black-box application of K and K^* to blocks of column vectors.
///
/// Implementations must be safe to call concurrently.
class OperatorOracle {
 public:
  virtual ~OperatorOracle() = default;

  virtual Index size() const = 0;
  virtual Matrix apply(const Matrix& x) const = 0;
  virtual Matrix apply_adjoint(const Matrix& x) const = 0;
};

/// One of the two access models. Holds non-owning pointers; the referenced
/// oracle must outlive any factorization call using it.
class MatrixOracle {
 public:
  static MatrixOracle entries(const EntryOracle& oracle) { return MatrixOracle(&oracle, nullptr); }
  static MatrixOracle operators(const OperatorOracle& oracle) {
    return MatrixOracle(nullptr, &oracle);
  }

  bool has_entries() const { return entry_ != nullptr; }
  bool has_operator() const { return operator_ != nullptr; }

  const EntryOracle& entry_oracle() const {
    if (!entry_) throw std::invalid_argument("entry oracle required");
    return *entry_;
  }
  const OperatorOracle& operator_oracle() const {
    if (!operator_) throw std::invalid_argument("operator oracle required");
    return *operator_;
  }
  Index size() const { return entry_ ? entry_->size() : operator_->size(); }

 private:
  MatrixOracle(const EntryOracle* e, const OperatorOracle* o) : entry_(e), operator_(o) {}

  const EntryOracle* entry_;
  const OperatorOracle* operator_;
};

/// Entry oracle over a stored dense matrix.
class DenseEntryOracle final : public EntryOracle {
 public:
  explicit DenseEntryOracle(Matrix k);

  Index size() const override { return k_.rows(); }
  Complex entry(Index i, Index j) const override { return k_(i, j); }
  Matrix submatrix(std::span<const Index> rows, std::span<const Index> cols) const override;

  const Matrix& matrix() const { return k_; }

 private:
  Matrix k_;
};

/// Operator oracle over a stored dense matrix.
class DenseOperator final : public OperatorOracle {
 public:
  explicit DenseOperator(Matrix k);

  Index size() const override { return k_.rows(); }
  Matrix apply(const Matrix& x) const override;
  Matrix apply_adjoint(const Matrix& x) const override;

  const Matrix& matrix() const { return k_; }

 private:
  Matrix k_;
};

}  // namespace bfly
