#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bfly/rng.hpp"
#include "bfly/types.hpp"

namespace bfly {

/// Rank-r approximate SVD  Z ~ u0 * diag(sigma0) * v0^*.
///
/// sigma0 is descending and nonnegative. When the source has fewer than r
/// numerically nonzero singular values the tail of sigma0 is zero; factor
/// widths stay fixed at r.
struct LowRankApprox {
  Matrix u0;           // m x r
  RealVector sigma0;   // r
  Matrix v0;           // n x r

  Index rank() const { return sigma0.size(); }
  Matrix dense() const;
};

/// CUR-like form  Z ~ u * s * vstar  with u = U0*S0, s = pinv(S0), vstar = S0*V0^*.
struct FactorFormA {
  Matrix u;
  RealVector s;  // diagonal of the r x r middle matrix
  Matrix vstar;

  Matrix dense() const;
};

/// Two-factor form  Z ~ u * vstar.
struct FactorFormUV {
  Matrix u;
  Matrix vstar;

  Matrix dense() const { return u * vstar; }
};

struct OversamplingParams {
  Index p = 5;      // additive oversampling (matvec engine)
  Index q = 3;      // multiplicative oversampling (sampling engine)
  Index iters = 3;  // skeleton refinement passes (sampling engine)

  void validate() const;
};

/// Singular values below this fraction of the largest are treated as zero
/// whenever a pseudo-inverse is formed.
inline constexpr double kPinvRelativeFloor = 1e-13;

/// Two pivot norms within this relative distance count as a tie; the lower
/// column index wins.
inline constexpr double kPivotTieTolerance = 1e-14;

struct PivotedQr {
  Matrix q;                  // m x k, orthonormal columns
  Matrix r;                  // k x n, upper trapezoidal in pivoted column order
  std::vector<Index> perm;   // perm[t] = original column chosen at step t (length n)
};

/// Householder QR with column pivoting, stopped after max_steps reflectors
/// (or min(m, n), whichever is smaller).
PivotedQr pivoted_qr(const Matrix& a, Index max_steps = -1);

/// Pseudo-inverse with the relative singular-value floor above.
Matrix pinv(const Matrix& a, double relative_floor = kPinvRelativeFloor);

/// Floored reciprocal of a descending singular-value vector.
RealVector pinv_diagonal(const RealVector& sigma, double relative_floor = kPinvRelativeFloor);

/// Optimal rank-r approximation by dense SVD. Requires 1 <= r <= min(m, n).
LowRankApprox truncated_svd(const Matrix& z, Index r);

/// Same as truncated_svd but accepts r > min(m, n) and zero-pads the factors
/// to width r. Used where block shapes must stay static.
LowRankApprox truncated_svd_padded(const Matrix& z, Index r);

/// Applies Z or Z^* to a block of column vectors.
struct OperatorFns {
  std::function<Matrix(const Matrix&)> apply;
  std::function<Matrix(const Matrix&)> apply_adjoint;
};

/// Randomized SVD from two Gaussian probes (range finder on Z and Z^*),
/// pivoted QR of both sketches, exact middle matrix Q_col^* Z Q_row formed
/// with one extra application of Z.
LowRankApprox randomized_svd(const OperatorFns& op, Index m, Index n, Index r,
                             const OversamplingParams& params, Rng& rng);

/// Finishes the randomized SVD from precomputed sketches when Z itself can no
/// longer be applied: y = Z * probe_col, w = Z^* * probe_row. The middle
/// matrix is recovered by least squares against probe_row.
LowRankApprox randomized_svd_from_sketches(const Matrix& y, const Matrix& w,
                                           const Matrix& probe_row, Index r);

/// Returns the submatrix Z(rows, cols) for local row/column indices.
using SubmatrixFn =
    std::function<Matrix(std::span<const Index> rows, std::span<const Index> cols)>;

/// Randomized sampling SVD: alternating pivoted QR/LQ skeleton selection on
/// sampled rows and columns, then a small least-squares middle matrix.
LowRankApprox randomized_sampling_svd(const SubmatrixFn& entries, Index m, Index n, Index r,
                                      const OversamplingParams& params, Rng& rng);

FactorFormA to_form_a(const LowRankApprox& a, double relative_floor = kPinvRelativeFloor);
/// u = U0*S0, vstar = V0^*.
FactorFormUV to_form_scaled_u(const LowRankApprox& a);
/// u = U0, vstar = S0*V0^*.
FactorFormUV to_form_scaled_v(const LowRankApprox& a);

/// Largest singular value of a dense matrix.
double spectral_norm(const Matrix& a);

}  // namespace bfly
