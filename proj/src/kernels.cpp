#include "bfly/kernels.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include <fftw3.h>

namespace bfly {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(2 pi i t) after reducing t to [0, 1).
Complex unit_phase(double t) { return std::polar(1.0, kTwoPi * (t - std::floor(t))); }

// Fractional part of (a * b) / n for integers, exactly.
double exact_fraction(std::int64_t a, std::int64_t b, std::int64_t n) {
  std::int64_t prod = (a % n) * (b % n) % n;
  if (prod < 0) prod += n;
  return static_cast<double>(prod) / static_cast<double>(n);
}

void check_index(Index n, Index i, Index j) {
  if (i < 0 || i >= n || j < 0 || j >= n) {
    throw std::out_of_range("entry (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") outside " + std::to_string(n) + " x " + std::to_string(n));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FIO kernel

Complex fio_entry(Index n, Index i, Index j) {
  const double x = static_cast<double>(i) / static_cast<double>(n);
  const double c = (2.0 + std::sin(kTwoPi * x)) / 8.0;
  double phase;
  if (n % 2 == 0) {
    const std::int64_t xi = static_cast<std::int64_t>(j) - static_cast<std::int64_t>(n / 2);
    const double linear = exact_fraction(static_cast<std::int64_t>(i), xi, n);
    const double bend = c * static_cast<double>(xi < 0 ? -xi : xi);
    phase = linear + (bend - std::floor(bend));
  } else {
    const double xi = static_cast<double>(j) - static_cast<double>(n) / 2.0;
    phase = x * xi + c * std::abs(xi);
  }
  return unit_phase(phase);
}

FioKernel::FioKernel(Index n) : n_(n) {
  if (n < 1) throw std::invalid_argument("FIO kernel size must be positive");
}

Matrix FioKernel::submatrix(std::span<const Index> rows, std::span<const Index> cols) const {
  for (Index i : rows) check_index(n_, i, 0);
  for (Index j : cols) check_index(n_, 0, j);
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  if (n_ % 2 != 0) {
    for (std::size_t b = 0; b < cols.size(); ++b)
      for (std::size_t a = 0; a < rows.size(); ++a)
        out(static_cast<Index>(a), static_cast<Index>(b)) = fio_entry(n_, rows[a], cols[b]);
    return out;
  }
  // Same arithmetic as fio_entry with c(x) hoisted out of the row loop.
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const Index i = rows[a];
    const double x = static_cast<double>(i) / static_cast<double>(n_);
    const double c = (2.0 + std::sin(kTwoPi * x)) / 8.0;
    for (std::size_t b = 0; b < cols.size(); ++b) {
      const std::int64_t xi = static_cast<std::int64_t>(cols[b]) - static_cast<std::int64_t>(n_ / 2);
      const double t = c * static_cast<double>(xi < 0 ? -xi : xi);
      const double linear = exact_fraction(static_cast<std::int64_t>(i), xi, n_);
      out(static_cast<Index>(a), static_cast<Index>(b)) = unit_phase(linear + (t - std::floor(t)));
    }
  }
  return out;
}

Complex FourierKernel::entry(Index j, Index k) const {
  if (n_ % 2 == 0) {
    const std::int64_t xi = static_cast<std::int64_t>(j) - static_cast<std::int64_t>(n_ / 2);
    return unit_phase(-exact_fraction(xi, static_cast<std::int64_t>(k), n_));
  }
  const double xi = static_cast<double>(j) - static_cast<double>(n_) / 2.0;
  return unit_phase(-xi * static_cast<double>(k) / static_cast<double>(n_));
}

// ---------------------------------------------------------------------------
// Bessel and Hankel functions

void bessel_jy(double x, std::span<double> j, std::span<double> y) {
  if (!(x > 0.0)) throw std::domain_error("bessel_jy requires x > 0");
  if (j.size() != y.size() || j.empty()) throw std::invalid_argument("bessel_jy: bad spans");
  const Index orders = static_cast<Index>(j.size());
  const Index top = orders - 1;

  // J_k(x) decays like Ai once k exceeds x by a few multiples of x^(1/3);
  // start far enough out that the neglected tail is below round-off.
  const double reach = std::max(static_cast<double>(top), x) + 20.0 + 16.0 * std::cbrt(x) +
                       std::sqrt(40.0 * static_cast<double>(top));
  Index start = static_cast<Index>(std::ceil(reach));
  if (start % 2 != 0) ++start;

  double above = 0.0;  // J_{k+1}
  double here = 1e-30; // J_k
  double norm = 0.0;   // J_0 + 2 sum_{k even >= 2} J_k
  for (Index k = start; k > 0; --k) {
    if (k <= top) j[static_cast<std::size_t>(k)] = here;
    if (k % 2 == 0) norm += 2.0 * here;
    const double below = (2.0 * static_cast<double>(k) / x) * here - above;
    above = here;
    here = below;
    if (std::abs(here) > 1e250) {
      const double s = 1e-250;
      here *= s;
      above *= s;
      norm *= s;
      for (Index t = k; t <= top; ++t) j[static_cast<std::size_t>(t)] *= s;
    }
  }
  j[0] = here;
  norm += here;
  for (auto& v : j) v /= norm;

  y[0] = std::cyl_neumann(0.0, x);
  if (orders > 1) y[1] = std::cyl_neumann(1.0, x);
  for (Index k = 1; k + 1 < orders; ++k) {
    y[static_cast<std::size_t>(k + 1)] = (2.0 * static_cast<double>(k) / x) *
                                             y[static_cast<std::size_t>(k)] -
                                         y[static_cast<std::size_t>(k - 1)];
  }
}

Complex hankel1(Index order, double x) {
  if (order < 0) throw std::invalid_argument("hankel1: negative order");
  std::vector<double> j(static_cast<std::size_t>(order + 1));
  std::vector<double> y(static_cast<std::size_t>(order + 1));
  bessel_jy(x, j, y);
  return {j.back(), y.back()};
}

double hankel_point(Index n, Index i) {
  return static_cast<double>(n) + (kTwoPi / 3.0) * static_cast<double>(i);
}

Complex hankel_entry(Index n, Index i, Index j) {
  check_index(n, i, j);
  return hankel1(j, hankel_point(n, i));
}

HankelKernel::HankelKernel(Index n, Index cache_limit) : n_(n), cache_(n <= cache_limit) {
  if (n < 1) throw std::invalid_argument("Hankel kernel size must be positive");
  if (cache_) {
    rows_.resize(static_cast<std::size_t>(n));
    once_ = std::make_unique<std::once_flag[]>(static_cast<std::size_t>(n));
  }
}

std::vector<Complex> HankelKernel::compute_row(Index i) const {
  std::vector<double> j(static_cast<std::size_t>(n_));
  std::vector<double> y(static_cast<std::size_t>(n_));
  bessel_jy(hankel_point(n_, i), j, y);
  std::vector<Complex> row(static_cast<std::size_t>(n_));
  for (std::size_t k = 0; k < row.size(); ++k) row[k] = {j[k], y[k]};
  return row;
}

const std::vector<Complex>& HankelKernel::cached_row(Index i) const {
  const auto k = static_cast<std::size_t>(i);
  std::call_once(once_[k], [&] { rows_[k] = compute_row(i); });
  return rows_[k];
}

Complex HankelKernel::entry(Index i, Index j) const {
  check_index(n_, i, j);
  // The uncached path runs the same full-row sweep so both agree bit for bit.
  if (cache_) return cached_row(i)[static_cast<std::size_t>(j)];
  return compute_row(i)[static_cast<std::size_t>(j)];
}

Matrix HankelKernel::submatrix(std::span<const Index> rows, std::span<const Index> cols) const {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    std::vector<Complex> scratch;
    const std::vector<Complex>* row;
    if (cache_) {
      check_index(n_, rows[a], 0);
      row = &cached_row(rows[a]);
    } else {
      scratch = compute_row(rows[a]);
      row = &scratch;
    }
    for (std::size_t b = 0; b < cols.size(); ++b) {
      check_index(n_, rows[a], cols[b]);
      out(static_cast<Index>(a), static_cast<Index>(b)) = (*row)[static_cast<std::size_t>(cols[b])];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dense enumeration

Matrix dense_matrix(const EntryOracle& oracle, Index cap) {
  const Index n = oracle.size();
  if (n > cap) {
    throw std::invalid_argument("dense_matrix: n = " + std::to_string(n) + " exceeds cap " +
                                std::to_string(cap));
  }
  std::vector<Index> all(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) all[static_cast<std::size_t>(k)] = k;
  return oracle.submatrix(all, all);
}

// ---------------------------------------------------------------------------
// Centered DFT

namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(Index n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<Complex> a(static_cast<std::size_t>(n));
    std::vector<Complex> b(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                                      reinterpret_cast<fftw_complex*>(b.data()), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("FFTW could not create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<Index, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

Matrix dft_apply(Index n, const Matrix& g, DftDirection direction) {
  if (g.rows() != n) {
    throw std::invalid_argument("dft_apply: input length " + std::to_string(g.rows()) +
                                " does not match n = " + std::to_string(n));
  }
  if (n % 2 != 0) throw std::invalid_argument("dft_apply: n must be even");
  const bool forward = direction == DftDirection::kForward;
  fftw_plan plan = plan_cache().get(n, forward ? FFTW_FORWARD : FFTW_BACKWARD);
  const double scale = direction == DftDirection::kInverse ? 1.0 / static_cast<double>(n) : 1.0;

  Matrix out(n, g.cols());
  std::vector<Complex> in(static_cast<std::size_t>(n));
  std::vector<Complex> res(static_cast<std::size_t>(n));
  for (Index c = 0; c < g.cols(); ++c) {
    // Forward: (F g)_j = sum_k e^{-2 pi i jk/n} (-1)^k g_k.
    // Adjoint: (F^* g)_k = (-1)^k sum_j e^{2 pi i jk/n} g_j.
    for (Index k = 0; k < n; ++k) {
      const Complex v = g(k, c);
      in[static_cast<std::size_t>(k)] = (forward && (k & 1)) ? -v : v;
    }
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(res.data()));
    for (Index k = 0; k < n; ++k) {
      Complex v = res[static_cast<std::size_t>(k)] * scale;
      out(k, c) = (!forward && (k & 1)) ? -v : v;
    }
  }
  return out;
}

Vector dft_apply(Index n, const Vector& g, DftDirection direction) {
  return dft_apply(n, Matrix(g), direction).col(0);
}

// ---------------------------------------------------------------------------
// Composition

ComposedOperator::ComposedOperator(std::shared_ptr<const ButterflyFactors> k_factors)
    : k_(std::move(k_factors)) {
  if (!k_) throw std::invalid_argument("composed operator needs factors for K");
}

Matrix ComposedOperator::apply(const Matrix& x) const {
  const Index n = k_->n();
  return bfly::apply(*k_, dft_apply(n, bfly::apply(*k_, x), DftDirection::kForward));
}

Matrix ComposedOperator::apply_adjoint(const Matrix& x) const {
  const Index n = k_->n();
  return bfly::apply_adjoint(*k_, dft_apply(n, bfly::apply_adjoint(*k_, x), DftDirection::kAdjoint));
}

Matrix composed_matvec(const ComposedOperator& c, const Matrix& g, bool adjoint) {
  return adjoint ? c.apply_adjoint(g) : c.apply(g);
}

}  // namespace bfly
