#pragma once

#include <Eigen/QR>

#include "bfly/rng.hpp"
#include "bfly/types.hpp"

namespace bfly::testing {

inline double rel_fro(const Matrix& a, const Matrix& ref) { return (a - ref).norm() / ref.norm(); }

// Random m x k matrix with orthonormal columns.
inline Matrix random_orthonormal(Index m, Index k, Rng& rng) {
  const Matrix g = complex_gaussian(m, k, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(m, k);
}

// U diag(sigma) V^* with Haar-ish random U, V.
inline Matrix with_spectrum(Index m, Index n, const RealVector& sigma, Rng& rng) {
  const Index k = sigma.size();
  return random_orthonormal(m, k, rng) * sigma.cast<Complex>().asDiagonal() *
         random_orthonormal(n, k, rng).adjoint();
}

inline Matrix random_rank(Index m, Index n, Index rank, Rng& rng) {
  return complex_gaussian(m, rank, rng) * complex_gaussian(rank, n, rng);
}

inline std::uint64_t seed_suite(int k) { return 1000003ULL * static_cast<std::uint64_t>(k + 1); }

}  // namespace bfly::testing
