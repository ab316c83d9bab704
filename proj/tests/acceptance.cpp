// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance 1 5        run a subset

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bfly/bench.hpp"
#include "bfly/serialize.hpp"
#include "test_util.hpp"

using namespace bfly;
using namespace bfly::testing;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [miss]");
  }
};

// Fixed five-seed suite for criterion 1.
const std::uint64_t kSeeds[5] = {1, 2, 3, 4, 5};
constexpr Index kSamples = 256;

ButterflyFactors factor_entries(const EntryOracle& k, Index r, FactorMode mode,
                                std::uint64_t seed, unsigned threads = 1) {
  FactorizeOptions o;
  o.seed = seed;
  o.threads = threads;
  return factorize(MatrixOracle::entries(k), make_partition(k.size(), kDefaultTargetLeaf), r, mode,
                   o);
}

double eps_entries(const ButterflyFactors& f, const EntryOracle& k, std::uint64_t seed) {
  Rng rng(row_seed(seed, k.size(), f.rank));
  return estimate_eps_a(f, reference_from_entries(k), k.size(), kSamples, rng).value;
}

void criterion_fio(Outcome& o) {
  const Index n = 1024;
  const FioKernel k(n);
  const std::pair<Index, double> targets[] = {{4, 1e-3}, {6, 1e-6}, {8, 1e-9}};
  for (const auto& [r, tol] : targets) {
    double worst = 0.0;
    for (std::uint64_t seed : kSeeds) {
      const ButterflyFactors f = factor_entries(k, r, FactorMode::kSampling, seed);
      worst = std::max(worst, eps_entries(f, k, seed));
    }
    o.require(worst <= tol, "r=" + std::to_string(r) + " max eps_a " + sci(worst) + " <= " + sci(tol));
  }
}

void criterion_hankel(Outcome& o) {
  const Index n = 1024;
  const HankelKernel k(n);
  const std::pair<Index, double> targets[] = {{4, 1e-4}, {6, 1e-6}};
  for (const auto& [r, tol] : targets) {
    const ButterflyFactors f = factor_entries(k, r, FactorMode::kSampling, 0);
    const double eps = eps_entries(f, k, 0);
    o.require(eps <= tol, "r=" + std::to_string(r) + " eps_a " + sci(eps) + " <= " + sci(tol));
  }
}

void criterion_composition(Outcome& o) {
  const Index n = 1024;
  KernelOptions ko;
  const KernelInstance k = make_kernel(KernelKind::kComposition, n, ko);
  const std::pair<Index, double> targets[] = {{4, 1e-1}, {8, 1e-3}, {12, 1e-6}};
  for (const auto& [r, tol] : targets) {
    FactorizeOptions fo;
    const ButterflyFactors f =
        factorize(k.oracle(FactorMode::kMatvec), make_partition(n, kDefaultTargetLeaf), r,
                  FactorMode::kMatvec, fo);
    Rng rng(row_seed(0, n, r));
    const double eps = estimate_eps_a(f, reference_for(k), n, kSamples, rng).value;
    o.require(eps <= tol, "r=" + std::to_string(r) + " eps_a " + sci(eps) + " <= " + sci(tol));
  }
}

void criterion_scaling(Outcome& o) {
  const Index sizes[] = {1024, 4096, 16384};
  double times[3];
  for (int t = 0; t < 3; ++t) {
    const FioKernel k(sizes[t]);
    const auto t0 = Clock::now();
    const ButterflyFactors f = factor_entries(k, 4, FactorMode::kSampling, 0);
    times[t] = since(t0);
  }
  const double a = times[1] / times[0];
  const double b = times[2] / times[1];
  o.require(a >= 4.0 && a <= 16.0, "T(4096)/T(1024) = " + sci(a));
  o.require(b >= 4.0 && b <= 16.0, "T(16384)/T(4096) = " + sci(b));
  o.detail << " (times " << sci(times[0]) << ", " << sci(times[1]) << ", " << sci(times[2]) << " s)";
}

void criterion_apply_cost(Outcome& o) {
  const Index r = 4;
  double prev = 0.0;
  bool first = true;
  for (Index n : {256, 1024, 4096}) {
    const FioKernel k(n);
    const ButterflyFactors f = factor_entries(k, r, FactorMode::kSampling, 0);
    const double ratio = static_cast<double>(nnz_report(f).total()) /
                         (static_cast<double>(n) * std::log2(static_cast<double>(n)) * r * r);
    o.require(ratio <= 4.0, "nnz ratio N=" + std::to_string(n) + " " + sci(ratio));
    if (!first) o.require(ratio <= 1.10 * prev, "trend N=" + std::to_string(n));
    prev = ratio;
    first = false;
  }

  const Index n = 65536;
  const FioKernel k(n);
  const ButterflyFactors f = factor_entries(k, r, FactorMode::kStreaming, 0);
  Rng rng(7);
  const Vector g = complex_gaussian(n, 1, rng).col(0);
  std::vector<double> ta;
  for (int t = 0; t < 3; ++t) {
    const auto t0 = Clock::now();
    const Vector u = bfly::apply(f, g);
    ta.push_back(since(t0));
  }
  std::sort(ta.begin(), ta.end());
  // Dense matvec: direct sum timed on 256 rows and scaled to all N rows.
  std::vector<Index> rows;
  for (Index a = 0; a < kSamples; ++a) rows.push_back(a * (n / kSamples));
  const auto t0 = Clock::now();
  const Vector part = reference_from_entries(k)(g, rows);
  const double td = since(t0) * static_cast<double>(n) / static_cast<double>(rows.size());
  const double speedup = td / ta[1];
  o.require(speedup >= 20.0, "N=65536 speedup " + sci(speedup) + " >= 20 (T_d " + sci(td) +
                                 " s, T_a " + sci(ta[1]) + " s)");
}

void criterion_exact_rank(Outcome& o) {
  const DyadicPartition p = make_partition(256, kDefaultTargetLeaf);
  const Matrix k = to_dense(make_random_butterfly(p, 4, 2024));
  const DenseEntryOracle oracle(k);
  const ButterflyFactors f = factor_entries(oracle, 4, FactorMode::kSampling, 11);
  Rng rng(12);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Vector g = complex_gaussian(256, 1, rng).col(0);
    const Vector ref = k * g;
    worst = std::max(worst, (bfly::apply(f, g) - ref).norm() / ref.norm());
  }
  o.require(worst <= 1e-10, "max relative error over 10 g " + sci(worst));
}

void criterion_invariants(Outcome& o) {
  const Index n = 1024, r = 4;
  const FioKernel k(n);
  const ButterflyFactors f = factor_entries(k, r, FactorMode::kSampling, 5, 1);
  const NnzReport rep = nnz_report(f);
  const std::size_t two_l = std::size_t{1} << f.partition.levels();
  o.require(rep.middle == two_l * r, "nnz(M)=2^L r");
  o.require(rep.u_outer == static_cast<std::size_t>(n * r) && rep.v_outer == rep.u_outer,
            "nnz(U^L)=nnz(V^L)=N r");

  Rng rng(6);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Vector x = complex_gaussian(n, 1, rng).col(0);
    const Vector y = complex_gaussian(n, 1, rng).col(0);
    const Complex lhs = y.dot(bfly::apply(f, x));
    const Complex rhs = bfly::apply_adjoint(f, y).dot(x);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
  }
  o.require(worst <= 1e-12, "adjoint identity " + sci(worst));

  const auto bytes = encode_factors(f);
  o.require(encode_factors(decode_factors(bytes)) == bytes, "serialization round trip");

  const bool threads_same =
      encode_factors(factor_entries(k, r, FactorMode::kSampling, 5, 4)) == bytes;
  const bool stream_same =
      encode_factors(factor_entries(k, r, FactorMode::kStreaming, 5, 2)) == bytes;
  o.require(threads_same, "threads 1 vs 4 bit-identical");
  o.require(stream_same, "streaming vs sampling bit-identical");
}

void criterion_engines(Outcome& o) {
  RealVector sigma(16);
  for (Index k = 0; k < 16; ++k) sigma(k) = std::pow(10.0, -static_cast<double>(k));
  const Index r = 4;
  double worst_mv = 0.0, worst_s = 0.0;
  for (int s = 0; s < 10; ++s) {
    Rng build(seed_suite(s));
    // Sampling needs incoherent rows and columns; Haar factors provide that.
    const Matrix z = with_spectrum(64, 64, sigma, build);
    const double best = spectral_norm(z - truncated_svd(z, r).dense());
    OperatorFns ops{[&z](const Matrix& x) { return Matrix(z * x); },
                    [&z](const Matrix& x) { return Matrix(z.adjoint() * x); }};
    Rng r1(seed_suite(s) + 1);
    worst_mv = std::max(worst_mv,
                        spectral_norm(z - randomized_svd(ops, 64, 64, r, {}, r1).dense()) / best);
    SubmatrixFn entries = [&z](std::span<const Index> rows, std::span<const Index> cols) {
      Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
      for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = 0; b < cols.size(); ++b)
          out(static_cast<Index>(a), static_cast<Index>(b)) = z(rows[a], cols[b]);
      return out;
    };
    Rng r2(seed_suite(s) + 2);
    worst_s = std::max(
        worst_s, spectral_norm(z - randomized_sampling_svd(entries, 64, 64, r, {}, r2).dense()) / best);
  }
  o.require(worst_mv <= 10.0, "matvec engine / optimum " + sci(worst_mv));
  o.require(worst_s <= 10.0, "sampling engine / optimum " + sci(worst_s));

  Rng rng(8);
  std::uniform_int_distribution<Index> order(0, 1022);
  std::uniform_real_distribution<double> where(1024.0, hankel_point(1024, 1023));
  double worst_w = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Index m = order(rng);
    const double x = where(rng);
    std::vector<double> j(static_cast<std::size_t>(m + 2)), y(static_cast<std::size_t>(m + 2));
    bessel_jy(x, j, y);
    const double w = j[static_cast<std::size_t>(m + 1)] * y[static_cast<std::size_t>(m)] -
                     j[static_cast<std::size_t>(m)] * y[static_cast<std::size_t>(m + 1)];
    worst_w = std::max(worst_w, std::abs(w - 2.0 / (std::numbers::pi * x)));
  }
  o.require(worst_w <= 1e-10, "Wronskian " + sci(worst_w));
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "FIO accuracy", criterion_fio},
      {2, "Hankel accuracy", criterion_hankel},
      {3, "composition accuracy", criterion_composition},
      {4, "construction scaling", criterion_scaling},
      {5, "apply cost", criterion_apply_cost},
      {6, "exact-rank equivalence", criterion_exact_rank},
      {7, "invariant suite", criterion_invariants},
      {8, "low-rank engines", criterion_engines},
  };
  std::set<int> only;
  for (int a = 1; a < argc; ++a) only.insert(std::atoi(argv[a]));

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    Outcome o;
    const auto t0 = Clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d %s: %s (%s) [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.str().c_str(), since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
