#include "bfly/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <lapacke.h>

namespace bfly {

namespace {

struct ThinSvd {
  Matrix u;          // m x k
  RealVector sigma;  // k, descending
  Matrix v;          // n x k
};

// Thin SVD through LAPACK's divide-and-conquer driver; Eigen's complex
// Jacobi SVD is several times slower on the small blocks used here.
ThinSvd thin_svd(const Matrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  const Index k = std::min(m, n);
  ThinSvd out{Matrix(m, k), RealVector(k), Matrix(n, k)};
  if (k == 0) return out;
  if (!a.allFinite()) throw std::domain_error("SVD of a matrix with non-finite entries");
  Matrix work = a;
  Matrix vt(k, n);
  auto* w = reinterpret_cast<lapack_complex_double*>(work.data());
  auto* u = reinterpret_cast<lapack_complex_double*>(out.u.data());
  auto* v = reinterpret_cast<lapack_complex_double*>(vt.data());
  const auto lm = static_cast<lapack_int>(m);
  const auto ln = static_cast<lapack_int>(n);
  const auto lk = static_cast<lapack_int>(k);
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', lm, ln, w, lm, out.sigma.data(), u, lm, v, lk);
  if (info > 0) {
    // Divide and conquer failed to converge; the QR-iteration driver is slower but sturdier.
    work = a;
    std::vector<double> superb(static_cast<std::size_t>(k));
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', lm, ln, w, lm, out.sigma.data(), u, lm, v, lk,
                          superb.data());
  }
  if (info != 0) throw std::runtime_error("LAPACK SVD failed, info = " + std::to_string(info));
  out.v = vt.adjoint();
  return out;
}

// Distinct indices from [0, dim) not already in `exclude`, uniformly at random.
std::vector<Index> sample_without(Index dim, Index count, const std::vector<Index>& exclude,
                                  Rng& rng) {
  std::vector<char> taken(static_cast<std::size_t>(dim), 0);
  for (Index e : exclude) taken[static_cast<std::size_t>(e)] = 1;
  std::vector<Index> pool;
  pool.reserve(static_cast<std::size_t>(dim));
  for (Index k = 0; k < dim; ++k) {
    if (!taken[static_cast<std::size_t>(k)]) pool.push_back(k);
  }
  const Index take = std::min<Index>(count, static_cast<Index>(pool.size()));
  for (Index t = 0; t < take; ++t) {
    std::uniform_int_distribution<Index> pick(t, static_cast<Index>(pool.size()) - 1);
    std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(take));
  return pool;
}

std::vector<Index> sorted_union(const std::vector<Index>& a, const std::vector<Index>& b) {
  std::vector<Index> out(a);
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Index> iota_indices(Index n) {
  std::vector<Index> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

Matrix select_rows(const Matrix& a, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t t = 0; t < rows.size(); ++t) out.row(static_cast<Index>(t)) = a.row(rows[t]);
  return out;
}

void check_rank(Index r, Index m, Index n, const char* who) {
  if (r < 1 || r > std::min(m, n)) {
    throw std::invalid_argument(std::string(who) + ": rank " + std::to_string(r) +
                                " outside [1, " + std::to_string(std::min(m, n)) + "]");
  }
}

// Assembles U0 = left * U_M, V0 = right * V_M from the SVD of the small core.
LowRankApprox finish_from_core(const Matrix& left, const Matrix& core, const Matrix& right,
                               Index r) {
  LowRankApprox core_svd = truncated_svd_padded(core, r);
  LowRankApprox out;
  out.u0 = left * core_svd.u0;
  out.sigma0 = core_svd.sigma0;
  out.v0 = right * core_svd.v0;
  return out;
}

}  // namespace

Matrix LowRankApprox::dense() const { return u0 * sigma0.cast<Complex>().asDiagonal() * v0.adjoint(); }

Matrix FactorFormA::dense() const { return u * s.cast<Complex>().asDiagonal() * vstar; }

void OversamplingParams::validate() const {
  if (p < 0) throw std::invalid_argument("oversampling p must be >= 0");
  if (q < 1) throw std::invalid_argument("oversampling q must be >= 1");
  if (iters < 1) throw std::invalid_argument("skeleton iterations must be >= 1");
}

PivotedQr pivoted_qr(const Matrix& a, Index max_steps) {
  const Index m = a.rows();
  const Index n = a.cols();
  Index k = std::min(m, n);
  if (max_steps >= 0) k = std::min(k, max_steps);

  Matrix work = a;
  std::vector<Index> perm = iota_indices(n);
  std::vector<Vector> reflectors(static_cast<std::size_t>(k));
  std::vector<double> taus(static_cast<std::size_t>(k), 0.0);
  RealVector norms(n);

  for (Index t = 0; t < k; ++t) {
    // Column norms are recomputed rather than downdated; k is small here.
    for (Index j = t; j < n; ++j) norms(j) = work.col(j).tail(m - t).norm();
    double best = -1.0;
    for (Index j = t; j < n; ++j) best = std::max(best, norms(j));
    Index pivot = -1;
    const double cutoff = best * (1.0 - kPivotTieTolerance);
    for (Index j = t; j < n; ++j) {
      if (norms(j) >= cutoff && (pivot < 0 || perm[static_cast<std::size_t>(j)] <
                                                  perm[static_cast<std::size_t>(pivot)])) {
        pivot = j;
      }
    }
    if (pivot != t) {
      work.col(t).swap(work.col(pivot));
      std::swap(perm[static_cast<std::size_t>(t)], perm[static_cast<std::size_t>(pivot)]);
    }

    Vector v = work.col(t).tail(m - t);
    const double xnorm = v.norm();
    if (xnorm == 0.0) {
      reflectors[static_cast<std::size_t>(t)] = Vector::Zero(m - t);
      continue;
    }
    const Complex x0 = v(0);
    const Complex phase = std::abs(x0) == 0.0 ? Complex(1.0, 0.0) : x0 / std::abs(x0);
    const Complex alpha = -phase * xnorm;
    v(0) -= alpha;
    const double vnorm2 = v.squaredNorm();
    const double tau = vnorm2 == 0.0 ? 0.0 : 2.0 / vnorm2;
    auto trailing = work.block(t, t, m - t, n - t);
    if (tau != 0.0) {
      Eigen::RowVectorXcd proj = v.adjoint() * trailing;
      trailing.noalias() -= (tau * v) * proj;
    }
    work(t, t) = alpha;
    work.col(t).tail(m - t - 1).setZero();
    reflectors[static_cast<std::size_t>(t)] = std::move(v);
    taus[static_cast<std::size_t>(t)] = tau;
  }

  PivotedQr out;
  out.q = Matrix::Identity(m, k);
  for (Index t = k - 1; t >= 0; --t) {
    const double tau = taus[static_cast<std::size_t>(t)];
    if (tau == 0.0) continue;
    const Vector& v = reflectors[static_cast<std::size_t>(t)];
    auto rows = out.q.bottomRows(m - t);
    Eigen::RowVectorXcd proj = v.adjoint() * rows;
    rows.noalias() -= (tau * v) * proj;
  }
  out.r = work.topRows(k).triangularView<Eigen::Upper>();
  out.perm = std::move(perm);
  return out;
}

RealVector pinv_diagonal(const RealVector& sigma, double relative_floor) {
  RealVector s = RealVector::Zero(sigma.size());
  if (sigma.size() == 0) return s;
  const double floor = relative_floor * sigma.maxCoeff();
  for (Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > floor && sigma(k) > 0.0) s(k) = 1.0 / sigma(k);
  }
  return s;
}

Matrix pinv(const Matrix& a, double relative_floor) {
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  const ThinSvd svd = thin_svd(a);
  const RealVector inv = pinv_diagonal(svd.sigma, relative_floor);
  return svd.v * inv.cast<Complex>().asDiagonal() * svd.u.adjoint();
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return thin_svd(a).sigma(0);
}

LowRankApprox truncated_svd_padded(const Matrix& z, Index r) {
  if (r < 0) throw std::invalid_argument("truncated_svd: negative rank");
  const Index m = z.rows();
  const Index n = z.cols();
  const Index kept = std::min({r, m, n});
  LowRankApprox out;
  out.u0 = Matrix::Zero(m, r);
  out.v0 = Matrix::Zero(n, r);
  out.sigma0 = RealVector::Zero(r);
  if (kept == 0) return out;
  const ThinSvd svd = thin_svd(z);
  out.u0.leftCols(kept) = svd.u.leftCols(kept);
  out.v0.leftCols(kept) = svd.v.leftCols(kept);
  out.sigma0.head(kept) = svd.sigma.head(kept);
  // Singular vectors of an exactly zero singular value are arbitrary; drop them.
  for (Index k = 0; k < kept; ++k) {
    if (out.sigma0(k) == 0.0) {
      out.u0.col(k).setZero();
      out.v0.col(k).setZero();
    }
  }
  return out;
}

LowRankApprox truncated_svd(const Matrix& z, Index r) {
  check_rank(r, z.rows(), z.cols(), "truncated_svd");
  return truncated_svd_padded(z, r);
}

LowRankApprox randomized_svd(const OperatorFns& op, Index m, Index n, Index r,
                             const OversamplingParams& params, Rng& rng) {
  params.validate();
  check_rank(r, m, n, "randomized_svd");
  const Index width = r + params.p;
  if (width > std::min(m, n)) {
    throw std::invalid_argument("randomized_svd: r + p exceeds min(m, n)");
  }
  const Matrix probe_col = complex_gaussian(n, width, rng);
  const Matrix probe_row = complex_gaussian(m, width, rng);
  const Matrix y = op.apply(probe_col);
  const Matrix w = op.apply_adjoint(probe_row);
  if (y.rows() != m || y.cols() != width || w.rows() != n || w.cols() != width) {
    throw std::runtime_error("randomized_svd: operator returned a block of the wrong shape");
  }
  const Matrix q_col = pivoted_qr(y, r).q;
  const Matrix q_row = pivoted_qr(w, r).q;
  const Matrix z_q_row = op.apply(q_row);
  if (z_q_row.rows() != m || z_q_row.cols() != r) {
    throw std::runtime_error("randomized_svd: operator returned a block of the wrong shape");
  }
  const Matrix core = q_col.adjoint() * z_q_row;
  return finish_from_core(q_col, core, q_row, r);
}

LowRankApprox randomized_svd_from_sketches(const Matrix& y, const Matrix& w,
                                           const Matrix& probe_row, Index r) {
  if (probe_row.rows() != y.rows() || probe_row.cols() != w.cols()) {
    throw std::invalid_argument("randomized_svd_from_sketches: probe shape mismatch");
  }
  check_rank(r, y.rows(), w.rows(), "randomized_svd_from_sketches");
  const Matrix q_col = pivoted_qr(y, r).q;
  const Matrix q_row = pivoted_qr(w, r).q;
  // Z ~ Q_col X with probe_row^* Z = w^*, so X = pinv(probe_row^* Q_col) w^*.
  const Matrix core = pinv(probe_row.adjoint() * q_col) * (w.adjoint() * q_row);
  return finish_from_core(q_col, core, q_row, r);
}

LowRankApprox randomized_sampling_svd(const SubmatrixFn& entries, Index m, Index n, Index r,
                                      const OversamplingParams& params, Rng& rng) {
  params.validate();
  check_rank(r, m, n, "randomized_sampling_svd");
  const Index extra = r * params.q;
  const std::vector<Index> all_rows = iota_indices(m);
  const std::vector<Index> all_cols = iota_indices(n);

  std::vector<Index> pi_col;
  std::vector<Index> pi_row;
  for (Index pass = 0; pass < params.iters; ++pass) {
    const std::vector<Index> rows = sorted_union(pi_row, sample_without(m, extra, pi_row, rng));
    const PivotedQr qr_rows = pivoted_qr(entries(rows, all_cols), r);
    pi_col.assign(qr_rows.perm.begin(), qr_rows.perm.begin() + std::min<Index>(r, n));

    const std::vector<Index> cols = sorted_union(pi_col, sample_without(n, extra, pi_col, rng));
    const PivotedQr lq_cols = pivoted_qr(entries(all_rows, cols).adjoint(), r);
    pi_row.assign(lq_cols.perm.begin(), lq_cols.perm.begin() + std::min<Index>(r, m));
  }

  const Matrix q_col = pivoted_qr(entries(all_rows, pi_col), r).q;
  const Matrix q_row = pivoted_qr(entries(pi_row, all_cols).adjoint(), r).q;

  const std::vector<Index> cols = sorted_union(pi_col, sample_without(n, extra, pi_col, rng));
  const std::vector<Index> rows = sorted_union(pi_row, sample_without(m, extra, pi_row, rng));
  const Matrix z_ij = entries(rows, cols);
  const Matrix left = select_rows(q_col, rows);                 // (Q_col)_{I,:}
  const Matrix right = select_rows(q_row, cols).adjoint();      // (Q_row^*)_{:,J}
  const Matrix core = pinv(left) * z_ij * pinv(right);
  return finish_from_core(q_col, core, q_row, r);
}

FactorFormA to_form_a(const LowRankApprox& a, double relative_floor) {
  const auto sigma = a.sigma0.cast<Complex>().asDiagonal();
  FactorFormA out;
  out.u = a.u0 * sigma;
  out.s = pinv_diagonal(a.sigma0, relative_floor);
  out.vstar = sigma * a.v0.adjoint();
  return out;
}

FactorFormUV to_form_scaled_u(const LowRankApprox& a) {
  return {a.u0 * a.sigma0.cast<Complex>().asDiagonal(), a.v0.adjoint()};
}

FactorFormUV to_form_scaled_v(const LowRankApprox& a) {
  return {a.u0, a.sigma0.cast<Complex>().asDiagonal() * a.v0.adjoint()};
}

}  // namespace bfly
