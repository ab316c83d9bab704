#include "bfly/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bfly {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

std::string format_g(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace

const char* to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kFio: return "fio";
    case KernelKind::kHankel: return "hankel";
    case KernelKind::kComposition: return "composition";
  }
  return "?";
}

KernelKind parse_kernel(const std::string& name) {
  if (name == "fio") return KernelKind::kFio;
  if (name == "hankel") return KernelKind::kHankel;
  if (name == "composition") return KernelKind::kComposition;
  throw std::invalid_argument("unknown kernel '" + name + "' (expected fio, hankel or composition)");
}

MatrixOracle KernelInstance::oracle(FactorMode mode) const {
  if (composed) return MatrixOracle::operators(*composed);
  if (mode == FactorMode::kMatvec && dense_op) return MatrixOracle::operators(*dense_op);
  return MatrixOracle::entries(*entries);
}

KernelInstance make_kernel(KernelKind kind, Index n, const KernelOptions& opts) {
  KernelInstance k;
  k.kind = kind;
  k.n = n;
  switch (kind) {
    case KernelKind::kFio:
      k.entries = std::make_unique<FioKernel>(n);
      break;
    case KernelKind::kHankel:
      k.entries = std::make_unique<HankelKernel>(n);
      break;
    case KernelKind::kComposition: {
      const FioKernel fio(n);
      FactorizeOptions fo;
      fo.seed = substream_seed(opts.seed, StreamTag::kKernelInner, static_cast<std::uint64_t>(n));
      fo.threads = opts.threads;
      const DyadicPartition p = make_partition(n, opts.target_leaf);
      k.inner = std::make_shared<const ButterflyFactors>(
          factorize(MatrixOracle::entries(fio), p, opts.inner_rank, FactorMode::kSampling, fo));
      k.composed = std::make_unique<ComposedOperator>(k.inner);
      break;
    }
  }
  if (opts.dense_operator && k.entries) {
    if (n > kDenseCap) {
      throw std::invalid_argument("matvec mode on an entry kernel needs n <= " +
                                  std::to_string(kDenseCap));
    }
    k.dense_op = std::make_unique<DenseOperator>(dense_matrix(*k.entries));
  }
  return k;
}

ReferenceRows reference_from_entries(const EntryOracle& oracle) {
  return [&oracle](const Vector& g, std::span<const Index> rows) {
    const Index n = oracle.size();
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    Vector out(static_cast<Index>(rows.size()));
    // One row at a time keeps memory at O(N).
    for (std::size_t a = 0; a < rows.size(); ++a) {
      const Matrix row = oracle.submatrix(rows.subspan(a, 1), all);
      out(static_cast<Index>(a)) = (row * g)(0, 0);
    }
    return out;
  };
}

ReferenceRows reference_from_operator(const OperatorOracle& op) {
  return [&op](const Vector& g, std::span<const Index> rows) {
    const Matrix full = op.apply(Matrix(g));
    Vector out(static_cast<Index>(rows.size()));
    for (std::size_t a = 0; a < rows.size(); ++a) out(static_cast<Index>(a)) = full(rows[a], 0);
    return out;
  };
}

ReferenceRows reference_for(const KernelInstance& k) {
  if (k.composed) return reference_from_operator(*k.composed);
  return reference_from_entries(*k.entries);
}

double relative_sample_error(const Vector& ua, const Vector& ud, bool* absolute) {
  if (ua.size() != ud.size()) throw std::invalid_argument("relative_sample_error: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (Index k = 0; k < ua.size(); ++k) {
    num += std::norm(ua(k) - ud(k));
    den += std::norm(ud(k));
  }
  if (absolute) *absolute = den == 0.0;
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

EpsEstimate estimate_eps_a(const ButterflyFactors& f, const ReferenceRows& reference, Index n,
                           Index sample_count, Rng& rng) {
  if (f.n() != n) throw std::invalid_argument("estimate_eps_a: size mismatch");
  if (sample_count < 1) throw std::invalid_argument("estimate_eps_a: sample_count must be >= 1");
  EpsEstimate est;
  est.clamped = sample_count > n;
  est.samples = std::min(sample_count, n);

  // Partial Fisher-Yates: first `samples` entries are a uniform draw without replacement.
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index t = 0; t < est.samples; ++t) {
    std::uniform_int_distribution<Index> pick(t, n - 1);
    std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  est.rows.assign(pool.begin(), pool.begin() + est.samples);
  std::sort(est.rows.begin(), est.rows.end());

  const Vector g = complex_gaussian(n, 1, rng).col(0);
  const Vector ua_full = bfly::apply(f, g);
  const Vector ud = reference(g, est.rows);
  Vector ua(static_cast<Index>(est.rows.size()));
  for (std::size_t a = 0; a < est.rows.size(); ++a) ua(static_cast<Index>(a)) = ua_full(est.rows[a]);
  est.value = relative_sample_error(ua, ud, &est.absolute);
  return est;
}

double dense_relative_error(const ButterflyFactors& f, const Matrix& k) {
  return (to_dense(f) - k).norm() / k.norm();
}

std::uint64_t row_seed(std::uint64_t master, Index n, Index r) {
  return substream_seed(master, StreamTag::kSampleSet, static_cast<std::uint64_t>(n),
                        static_cast<std::uint64_t>(r));
}

BenchReport run_bench(const BenchConfig& cfg) {
  BenchReport report;
  report.kernel = cfg.kernel;
  report.mode = cfg.mode.value_or(cfg.kernel == KernelKind::kComposition ? FactorMode::kMatvec
                                                                         : FactorMode::kSampling);
  if (cfg.apply_repeats < 1) throw std::invalid_argument("apply_repeats must be >= 1");
  if (cfg.sample_count < 1) throw std::invalid_argument("sample count must be >= 1");

  for (const Index n : cfg.n_list) {
    std::optional<KernelInstance> kernel;
    std::string kernel_error;
    try {
      KernelOptions ko;
      ko.inner_rank = cfg.inner_rank;
      ko.target_leaf = cfg.target_leaf;
      ko.seed = cfg.seed;
      ko.threads = cfg.threads;
      ko.dense_operator = report.mode == FactorMode::kMatvec;
      kernel.emplace(make_kernel(cfg.kernel, n, ko));
    } catch (const std::exception& e) {
      kernel_error = e.what();
    }

    for (const Index r : cfg.rank_list) {
      BenchRow row;
      row.n = n;
      row.r = r;
      row.seed = cfg.seed;
      if (!kernel) {
        row.failed = true;
        row.eps_a = std::nan("");
        row.notes.push_back("kernel setup failed: " + kernel_error);
        report.rows.push_back(std::move(row));
        continue;
      }
      try {
        const DyadicPartition p = make_partition(n, cfg.target_leaf);
        FactorizeOptions fo;
        fo.params = cfg.params;
        fo.seed = cfg.seed;
        fo.threads = cfg.threads;

        const auto t0 = Clock::now();
        const ButterflyFactors f = factorize(kernel->oracle(report.mode), p, r, report.mode, fo);
        row.t_factor_s = seconds_since(t0);
        row.nnz_total = nnz_report(f).total();

        Rng rng(row_seed(cfg.seed, n, r));
        const ReferenceRows reference = reference_for(*kernel);
        const EpsEstimate est = estimate_eps_a(f, reference, n, cfg.sample_count, rng);
        row.eps_a = est.value;
        if (est.clamped) {
          row.notes.push_back("sample count " + std::to_string(cfg.sample_count) +
                              " clamped to " + std::to_string(n));
        }
        if (est.absolute) row.notes.push_back("reference vanished on S; eps_a is absolute");

        Rng input_rng = make_substream(cfg.seed, StreamTag::kBenchInput,
                                       static_cast<std::uint64_t>(n));
        const Vector g = complex_gaussian(n, 1, input_rng).col(0);

        // Direct evaluation: timed on S and scaled to all N rows for entry
        // kernels; the composed chain itself for composition.
        if (kernel->composed) {
          const auto td = Clock::now();
          const Matrix full = kernel->composed->apply(Matrix(g));
          row.t_dense_s = seconds_since(td);
        } else {
          const auto td = Clock::now();
          const Vector part = reference(g, est.rows);
          row.t_dense_s = seconds_since(td) * static_cast<double>(n) /
                          static_cast<double>(est.rows.size());
        }

        std::vector<double> times;
        for (int k = 0; k < cfg.apply_repeats; ++k) {
          const auto ta = Clock::now();
          const Vector u = bfly::apply(f, g);
          times.push_back(seconds_since(ta));
        }
        row.t_apply_s = median(times);
        row.speedup = row.t_apply_s > 0.0 ? row.t_dense_s / row.t_apply_s : 0.0;
      } catch (const std::exception& e) {
        row.failed = true;
        row.eps_a = std::nan("");
        row.notes.push_back(std::string("factorization failed: ") + e.what());
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

bool BenchReport::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.failed; });
}

std::string BenchReport::to_json() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["n"] = r.n;
    o["r"] = r.r;
    if (std::isfinite(r.eps_a)) {
      o["eps_a"] = r.eps_a;
    } else {
      o["eps_a"] = nullptr;
    }
    o["t_factor_s"] = r.t_factor_s;
    o["t_dense_s"] = r.t_dense_s;
    o["t_apply_s"] = r.t_apply_s;
    o["speedup"] = r.speedup;
    o["nnz_total"] = r.nnz_total;
    o["seed"] = r.seed;
    if (!r.notes.empty()) o["notes"] = r.notes;
    out.push_back(std::move(o));
  }
  return out.dump(2) + "\n";
}

std::string BenchReport::to_csv() const {
  std::ostringstream os;
  os << "n,r,eps_a,t_factor_s,t_dense_s,t_apply_s,speedup,nnz_total,seed,notes\n";
  for (const auto& r : rows) {
    std::string notes;
    for (const auto& n : r.notes) {
      if (!notes.empty()) notes += "; ";
      notes += n;
    }
    std::replace(notes.begin(), notes.end(), '"', '\'');
    os << r.n << ',' << r.r << ',' << format_g(r.eps_a, 17) << ',' << format_g(r.t_factor_s, 6)
       << ',' << format_g(r.t_dense_s, 6) << ',' << format_g(r.t_apply_s, 6) << ','
       << format_g(r.speedup, 6) << ',' << r.nnz_total << ',' << r.seed << ",\"" << notes
       << "\"\n";
  }
  return os.str();
}

}  // namespace bfly
