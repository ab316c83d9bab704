#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "bfly/butterfly.hpp"
#include "bfly/oracle.hpp"

namespace bfly {

// All indices are 0-based.

/// exp(2 pi i Phi(x_i, xi_j)) with Phi(x, xi) = x*xi + c(x)|xi|,
/// c(x) = (2 + sin(2 pi x)) / 8, x_i = i/n, xi_j = j - n/2.
Complex fio_entry(Index n, Index i, Index j);

class FioKernel final : public EntryOracle {
 public:
  explicit FioKernel(Index n);

  Index size() const override { return n_; }
  Complex entry(Index i, Index j) const override { return fio_entry(n_, i, j); }
  Matrix submatrix(std::span<const Index> rows, std::span<const Index> cols) const override;

 private:
  Index n_;
};

/// J_k(x) and Y_k(x) for k = 0..j.size()-1. J by normalized backward
/// recurrence, Y by forward recurrence from Y_0, Y_1.
void bessel_jy(double x, std::span<double> j, std::span<double> y);

/// H^(1)_order(x) = J_order(x) + i Y_order(x).
Complex hankel1(Index order, double x);

/// Sample point of row i: n + (2 pi / 3) i.
double hankel_point(Index n, Index i);

/// H^(1)_j(x_i).
Complex hankel_entry(Index n, Index i, Index j);

/// Entry oracle for K_ij = H^(1)_j(x_i). Each row costs one recurrence sweep
/// over all orders; rows are memoized when n <= cache_limit.
class HankelKernel final : public EntryOracle {
 public:
  explicit HankelKernel(Index n, Index cache_limit = 2048);

  Index size() const override { return n_; }
  Complex entry(Index i, Index j) const override;
  Matrix submatrix(std::span<const Index> rows, std::span<const Index> cols) const override;

 private:
  std::vector<Complex> compute_row(Index i) const;
  const std::vector<Complex>& cached_row(Index i) const;

  Index n_;
  bool cache_;
  mutable std::vector<std::vector<Complex>> rows_;
  mutable std::unique_ptr<std::once_flag[]> once_;
};

/// F_jk = exp(-2 pi i xi_j x_k) on the FIO grids.
class FourierKernel final : public EntryOracle {
 public:
  explicit FourierKernel(Index n) : n_(n) {}

  Index size() const override { return n_; }
  Complex entry(Index j, Index k) const override;

 private:
  Index n_;
};

/// Identity matrix as an entry oracle.
class IdentityKernel final : public EntryOracle {
 public:
  explicit IdentityKernel(Index n) : n_(n) {}

  Index size() const override { return n_; }
  Complex entry(Index i, Index j) const override { return i == j ? Complex(1.0) : Complex(0.0); }

 private:
  Index n_;
};

inline constexpr Index kDenseCap = 4096;

/// Full enumeration of an entry oracle.
Matrix dense_matrix(const EntryOracle& oracle, Index cap = kDenseCap);

enum class DftDirection {
  kForward,  // F g
  kAdjoint,  // F^* g
  kInverse,  // F^* g / n
};

/// Centered transform F_jk = exp(-2 pi i xi_j x_k) via FFT. Applies to each
/// column of g.
Matrix dft_apply(Index n, const Matrix& g, DftDirection direction);
Vector dft_apply(Index n, const Vector& g, DftDirection direction);

/// K~ = K F K, with K applied through its butterfly factorization and F
/// through the FFT.
class ComposedOperator final : public OperatorOracle {
 public:
  explicit ComposedOperator(std::shared_ptr<const ButterflyFactors> k_factors);

  Index size() const override { return k_->n(); }
  Matrix apply(const Matrix& x) const override;
  Matrix apply_adjoint(const Matrix& x) const override;

  const ButterflyFactors& k_factors() const { return *k_; }

 private:
  std::shared_ptr<const ButterflyFactors> k_;
};

Matrix composed_matvec(const ComposedOperator& c, const Matrix& g, bool adjoint);

}  // namespace bfly
