#include "bfly/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "bfly/bench.hpp"
#include "bfly/serialize.hpp"

namespace bfly {

namespace {

// Argument problems detected after parsing (bad sizes, missing files, ...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string kernel = "fio";
  Index n = 0;
  Index rank = 0;
  std::string mode;
  std::uint64_t seed = 0;
  Index leaf = kDefaultTargetLeaf;
  Index inner_rank = kDefaultInnerRank;
  unsigned threads = 1;
  OversamplingParams params;
};

void add_common(CLI::App* cmd, CommonFlags& c, bool sized) {
  cmd->add_option("--kernel", c.kernel, "fio | hankel | composition")->capture_default_str();
  if (sized) {
    cmd->add_option("--n", c.n, "matrix size (power of two)")->required();
    cmd->add_option("--rank", c.rank, "butterfly rank r")->required();
  }
  cmd->add_option("--mode", c.mode, "sampling | matvec | streaming (default depends on kernel)");
  cmd->add_option("--seed", c.seed, "master seed")->capture_default_str();
  cmd->add_option("--leaf", c.leaf, "target leaf size")->capture_default_str();
  cmd->add_option("--inner-rank", c.inner_rank, "rank of K inside K F K")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads")->capture_default_str();
  cmd->add_option("--oversample-p", c.params.p, "additive oversampling")->capture_default_str();
  cmd->add_option("--oversample-q", c.params.q, "multiplicative oversampling")
      ->capture_default_str();
  cmd->add_option("--iters", c.params.iters, "skeleton refinement passes")->capture_default_str();
}

KernelOptions kernel_options(const CommonFlags& c) {
  KernelOptions ko;
  ko.dense_operator = c.mode == "matvec";
  ko.inner_rank = c.inner_rank;
  ko.target_leaf = c.leaf;
  ko.seed = c.seed;
  ko.threads = c.threads;
  return ko;
}

FactorMode resolve_mode(const CommonFlags& c, const KernelInstance& k) {
  return c.mode.empty() ? k.default_mode() : parse_factor_mode(c.mode);
}

FactorizeOptions factorize_options(const CommonFlags& c) {
  FactorizeOptions fo;
  fo.params = c.params;
  fo.seed = c.seed;
  fo.threads = c.threads;
  return fo;
}

int run_factor(const CommonFlags& c, const std::string& out_path, std::ostream& out) {
  const KernelKind kind = parse_kernel(c.kernel);
  const DyadicPartition p = make_partition(c.n, c.leaf);
  const KernelInstance k = make_kernel(kind, c.n, kernel_options(c));
  const FactorMode mode = resolve_mode(c, k);
  const auto t0 = std::chrono::steady_clock::now();
  const ButterflyFactors f = factorize(k.oracle(mode), p, c.rank, mode, factorize_options(c));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  save_factors(f, out_path);
  nlohmann::ordered_json j;
  j["kernel"] = to_string(kind);
  j["n"] = c.n;
  j["levels"] = p.levels();
  j["rank"] = c.rank;
  j["mode"] = to_string(mode);
  j["seed"] = c.seed;
  j["nnz_total"] = nnz_report(f).total();
  j["t_factor_s"] = secs;
  j["out"] = out_path;
  out << j.dump(2) << "\n";
  return kExitOk;
}

int run_apply(const std::string& factors, const std::string& input, const std::string& output,
              bool adjoint) {
  const ButterflyFactors f = load_factors(factors);
  const Vector g = load_vector(input);
  if (g.size() != f.n()) {
    throw UsageError("input vector has length " + std::to_string(g.size()) + ", factors have N = " +
                     std::to_string(f.n()));
  }
  const Vector u = adjoint ? bfly::apply_adjoint(f, g) : bfly::apply(f, g);
  if (!u.allFinite()) throw std::runtime_error("apply produced non-finite values");
  save_vector(u, output);
  return kExitOk;
}

int run_bench_cmd(const CommonFlags& c, const std::vector<Index>& n_list,
                  const std::vector<Index>& rank_list, Index samples, const std::string& format,
                  const std::string& out_path, std::ostream& out) {
  BenchConfig cfg;
  cfg.kernel = parse_kernel(c.kernel);
  cfg.n_list = n_list;
  cfg.rank_list = rank_list;
  if (!c.mode.empty()) cfg.mode = parse_factor_mode(c.mode);
  cfg.seed = c.seed;
  cfg.sample_count = samples;
  cfg.target_leaf = c.leaf;
  cfg.inner_rank = c.inner_rank;
  cfg.threads = c.threads;
  cfg.params = c.params;
  c.params.validate();
  if (samples < 1) throw UsageError("--samples must be >= 1");

  const BenchReport report = run_bench(cfg);
  const std::string text = format == "csv" ? report.to_csv() : report.to_json();
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    std::ofstream file(out_path);
    if (!file) throw IoError("cannot open '" + out_path + "' for writing");
    file << text;
  }
  return report.any_failed() ? kExitNumerical : kExitOk;
}

int run_verify(const CommonFlags& c, const std::string& factors_path, Index samples,
               std::optional<double> tol, std::ostream& out, std::ostream& err) {
  const KernelKind kind = parse_kernel(c.kernel);
  if (c.n > kDenseCap) {
    throw UsageError("verify compares against the dense matrix; n must be <= " +
                     std::to_string(kDenseCap));
  }
  const KernelInstance k = make_kernel(kind, c.n, kernel_options(c));
  ButterflyFactors f;
  std::string source;
  if (!factors_path.empty()) {
    f = load_factors(factors_path);
    if (f.n() != c.n) {
      throw UsageError("factor file has N = " + std::to_string(f.n()) + ", --n is " +
                       std::to_string(c.n));
    }
    source = factors_path;
  } else {
    const DyadicPartition p = make_partition(c.n, c.leaf);
    const FactorMode mode = resolve_mode(c, k);
    f = factorize(k.oracle(mode), p, c.rank, mode, factorize_options(c));
    source = "fresh";
  }

  Matrix dense;
  if (k.entries) {
    dense = dense_matrix(*k.entries);
  } else {
    dense = k.composed->apply(Matrix::Identity(c.n, c.n));
  }
  const double eps_fro = dense_relative_error(f, dense);

  Rng rng(row_seed(c.seed, c.n, f.rank));
  const EpsEstimate est = estimate_eps_a(f, reference_for(k), c.n, samples, rng);

  nlohmann::ordered_json j;
  j["kernel"] = to_string(kind);
  j["n"] = c.n;
  j["rank"] = f.rank;
  j["factors"] = source;
  j["eps_fro"] = eps_fro;
  j["eps_a"] = est.value;
  if (est.absolute) j["eps_a_absolute"] = true;
  if (kind == KernelKind::kComposition) {
    // Error against the exact K F K, which includes the inner truncation of K.
    const Matrix kd = dense_matrix(FioKernel(c.n));
    const Matrix exact = kd * dft_apply(c.n, kd, DftDirection::kForward);
    j["eps_fro_exact"] = dense_relative_error(f, exact);
  }
  out << j.dump(2) << "\n";

  if (!std::isfinite(eps_fro) || !std::isfinite(est.value)) return kExitNumerical;
  if (tol && (eps_fro > *tol || est.value > *tol)) {
    err << "verify: error exceeds tolerance " << *tol << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Butterfly factorization of complementary low-rank matrices", "bfly"};
  app.require_subcommand(1);

  CommonFlags factor_flags;
  std::string factor_out;
  CLI::App* factor = app.add_subcommand("factor", "factorize a kernel and write a .bfac file");
  add_common(factor, factor_flags, true);
  factor->add_option("--out", factor_out, "output .bfac path")->required();

  std::string apply_factors, apply_in, apply_out;
  bool apply_adj = false;
  CLI::App* apply_cmd = app.add_subcommand("apply", "apply stored factors to a vector file");
  apply_cmd->add_option("--factors", apply_factors, ".bfac path")->required();
  apply_cmd->add_option("--input", apply_in, "input vector file")->required();
  apply_cmd->add_option("--output", apply_out, "output vector file")->required();
  apply_cmd->add_flag("--adjoint", apply_adj, "apply K^* instead of K");

  CommonFlags bench_flags;
  std::vector<Index> n_list, rank_list;
  Index bench_samples = kDefaultSampleCount;
  std::string format = "json", bench_out;
  CLI::App* bench = app.add_subcommand("bench", "accuracy and timing table");
  add_common(bench, bench_flags, false);
  bench->add_option("--n-list", n_list, "sizes, comma separated")->required()->delimiter(',');
  bench->add_option("--rank-list", rank_list, "ranks, comma separated")->required()->delimiter(',');
  bench->add_option("--samples", bench_samples, "size of the row sample S")->capture_default_str();
  bench->add_option("--format", format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  bench->add_option("--out", bench_out, "report path (stdout when omitted)");

  CommonFlags verify_flags;
  std::string verify_factors;
  Index verify_samples = kDefaultSampleCount;
  std::optional<double> verify_tol;
  CLI::App* verify = app.add_subcommand("verify", "dense comparison (n <= 4096)");
  add_common(verify, verify_flags, true);
  verify->add_option("--factors", verify_factors, "replay a stored .bfac instead of factorizing");
  verify->add_option("--samples", verify_samples, "size of the row sample S")->capture_default_str();
  verify->add_option("--tol", verify_tol, "exit 2 when either error exceeds this");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (factor->parsed()) return run_factor(factor_flags, factor_out, out);
    if (apply_cmd->parsed()) return run_apply(apply_factors, apply_in, apply_out, apply_adj);
    if (bench->parsed()) {
      return run_bench_cmd(bench_flags, n_list, rank_list, bench_samples, format, bench_out, out);
    }
    if (verify->parsed()) {
      return run_verify(verify_flags, verify_factors, verify_samples, verify_tol, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace bfly
