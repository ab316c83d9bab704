#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "bfly/bench.hpp"
#include "bfly/cli.hpp"
#include "bfly/serialize.hpp"
#include "test_util.hpp"

using namespace bfly;
using namespace bfly::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    Rng rng(std::random_device{}());
    path = fs::temp_directory_path() / ("bfly-test-" + std::to_string(rng()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

class ScaledOperator final : public OperatorOracle {
 public:
  ScaledOperator(const ButterflyFactors& f, double s) : f_(f), s_(s) {}
  Index size() const override { return f_.n(); }
  Matrix apply(const Matrix& x) const override { return s_ * bfly::apply(f_, x); }
  Matrix apply_adjoint(const Matrix& x) const override { return s_ * bfly::apply_adjoint(f_, x); }

 private:
  const ButterflyFactors& f_;
  double s_;
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

ButterflyFactors sample_factors() {
  return make_random_butterfly(make_partition(64, 1), 3, 17);
}

}  // namespace

TEST_CASE("eps_a of identical operators is zero") {
  const ButterflyFactors f = sample_factors();
  const ButterflyOperator op(f);
  Rng rng(1);
  const EpsEstimate e = estimate_eps_a(f, reference_from_operator(op), 64, 32, rng);
  CHECK(e.value <= 1e-15);
  CHECK(e.value == 0.0);
  CHECK_FALSE(e.absolute);
  CHECK(e.samples == 32);
}

TEST_CASE("eps_a of a scalar perturbation") {
  const ButterflyFactors f = sample_factors();
  // u^a = 1.001 u^d  <=>  reference = f / 1.001
  const ScaledOperator ref(f, 1.0 / 1.001);
  Rng rng(2);
  const EpsEstimate e = estimate_eps_a(f, reference_from_operator(ref), 64, 64, rng);
  CHECK(std::abs(e.value - 1e-3) <= 1e-12);
}

TEST_CASE("eps_a ratio is invariant under scaling of g") {
  Rng rng(3);
  const Vector ud = complex_gaussian(50, 1, rng).col(0);
  const Vector ua = ud + 1e-4 * complex_gaussian(50, 1, rng).col(0);
  const double base = relative_sample_error(ua, ud);
  // ua - ud is 1e-4 of |ud|, so rounding of the scaled vectors is amplified ~1e4.
  CHECK(std::abs(relative_sample_error(Complex(7.0, -3.0) * ua, Complex(7.0, -3.0) * ud) - base) <=
        1e-11 * base);
  bool absolute = false;
  CHECK(relative_sample_error(ua, Vector::Zero(50), &absolute) == doctest::Approx(ua.norm()));
  CHECK(absolute);
}

TEST_CASE("eps_a clamps the sample count and flags zero references") {
  const ButterflyFactors f = sample_factors();
  const ScaledOperator zero(f, 0.0);
  Rng rng(4);
  const EpsEstimate e = estimate_eps_a(f, reference_from_operator(zero), 64, 1000, rng);
  CHECK(e.clamped);
  CHECK(e.samples == 64);
  CHECK(e.absolute);
  CHECK(e.value > 0.0);
}

TEST_CASE("direct-row reference agrees with the dense matvec") {
  const FioKernel k(128);
  const Matrix kd = dense_matrix(k);
  Rng rng(5);
  const Vector g = complex_gaussian(128, 1, rng).col(0);
  const std::vector<Index> rows{0, 5, 77, 127};
  const Vector part = reference_from_entries(k)(g, rows);
  const Vector full = kd * g;
  for (std::size_t a = 0; a < rows.size(); ++a)
    CHECK(std::abs(part(static_cast<Index>(a)) - full(rows[a])) <= 1e-12 * full.norm());
}

TEST_CASE("bench report structure") {
  BenchConfig cfg;
  cfg.kernel = KernelKind::kFio;
  cfg.n_list = {64};
  cfg.rank_list = {2, 4};
  cfg.sample_count = 500;
  cfg.seed = 9;
  const BenchReport rep = run_bench(cfg);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& row : rep.rows) {
    CHECK_FALSE(row.failed);
    CHECK(row.notes.size() == 1);  // clamped sample count
    CHECK(row.notes[0].find("clamped") != std::string::npos);
    CHECK(row.speedup == doctest::Approx(row.t_dense_s / row.t_apply_s).epsilon(1e-12));
    CHECK(row.nnz_total > 0);
  }
  const auto json = nlohmann::json::parse(rep.to_json());
  REQUIRE(json.is_array());
  for (const char* key : {"n", "r", "eps_a", "t_factor_s", "t_dense_s", "t_apply_s", "speedup",
                          "nnz_total", "seed"}) {
    CHECK(json[0].contains(key));
  }
  const std::string csv = rep.to_csv();
  CHECK(csv.rfind("n,r,eps_a,t_factor_s,t_dense_s,t_apply_s,speedup,nnz_total,seed", 0) == 0);
}

TEST_CASE("bench records failures per row and continues") {
  BenchConfig cfg;
  cfg.n_list = {48, 64};
  cfg.rank_list = {2};
  const BenchReport rep = run_bench(cfg);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].failed);
  CHECK_FALSE(rep.rows[1].failed);
  CHECK(rep.any_failed());
}

TEST_CASE("bench numbers are deterministic across runs and thread counts") {
  BenchConfig cfg;
  cfg.n_list = {256};
  cfg.rank_list = {4};
  cfg.seed = 21;
  const BenchReport a = run_bench(cfg);
  cfg.threads = 4;
  const BenchReport b = run_bench(cfg);
  cfg.mode = FactorMode::kStreaming;
  const BenchReport c = run_bench(cfg);
  CHECK(a.rows[0].eps_a == b.rows[0].eps_a);
  CHECK(a.rows[0].eps_a == c.rows[0].eps_a);
  CHECK(a.rows[0].nnz_total == b.rows[0].nnz_total);
}

TEST_CASE("bench accuracy improves with rank") {
  BenchConfig cfg;
  cfg.n_list = {1024};
  cfg.rank_list = {4, 8};
  const BenchReport rep = run_bench(cfg);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[1].eps_a < rep.rows[0].eps_a);
}

TEST_CASE("serialization round trip is bit exact") {
  TempDir dir;
  const FioKernel k(256);
  FactorizeOptions o;
  o.seed = 3;
  const ButterflyFactors f =
      factorize(MatrixOracle::entries(k), make_partition(256, 1), 4, FactorMode::kSampling, o);
  save_factors(f, dir.file("a.bfac"));
  const ButterflyFactors g = load_factors(dir.file("a.bfac"));
  save_factors(g, dir.file("b.bfac"));
  CHECK(read_file(dir.file("a.bfac")) == read_file(dir.file("b.bfac")));

  Rng rng(1);
  const Vector x = complex_gaussian(256, 1, rng).col(0);
  const Vector u1 = bfly::apply(f, x);
  const Vector u2 = bfly::apply(g, x);
  CHECK(std::memcmp(u1.data(), u2.data(), sizeof(Complex) * 256) == 0);
}

TEST_CASE("format errors report the byte offset") {
  const std::vector<std::uint8_t> bytes = encode_factors(sample_factors());
  std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + 100);
  try {
    decode_factors(cut);
    FAIL("truncated file decoded");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 100);
  }
  std::vector<std::uint8_t> bad = bytes;
  bad[0] = 'X';
  try {
    decode_factors(bad);
    FAIL("bad magic accepted");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 0);
  }
  bad = bytes;
  bad[4] = 2;
  try {
    decode_factors(bad);
    FAIL("bad version accepted");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 4);
  }
  bad = bytes;
  bad.push_back(0);
  CHECK_THROWS_AS(decode_factors(bad), FormatError);
}

TEST_CASE("vector files") {
  TempDir dir;
  Rng rng(6);
  const Vector v = complex_gaussian(33, 1, rng).col(0);
  save_vector(v, dir.file("v.bin"));
  CHECK(load_vector(dir.file("v.bin")) == v);
  CHECK(fs::file_size(dir.file("v.bin")) == 8 + 33 * 16);
}

TEST_CASE("cli: factor, apply, verify") {
  TempDir dir;
  const std::string bfac = dir.file("k.bfac");
  CliRun r = run_cli({"factor", "--kernel", "fio", "--n", "256", "--rank", "8", "--mode",
                      "sampling", "--seed", "7", "--out", bfac});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(bfac));

  save_vector(Vector::Zero(256), dir.file("zero.bin"));
  r = run_cli({"apply", "--factors", bfac, "--input", dir.file("zero.bin"), "--output",
               dir.file("out.bin")});
  REQUIRE(r.code == 0);
  const Vector out = load_vector(dir.file("out.bin"));
  CHECK(out.size() == 256);
  CHECK(out.norm() == 0.0);

  r = run_cli({"verify", "--kernel", "fio", "--n", "256", "--rank", "8", "--seed", "7",
               "--factors", bfac});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["eps_fro"].get<double>() <= 1e-5);

  save_vector(Vector::Zero(128), dir.file("short.bin"));
  r = run_cli({"apply", "--factors", bfac, "--input", dir.file("short.bin"), "--output",
               dir.file("o2.bin")});
  CHECK(r.code == 1);
}

TEST_CASE("cli: argument errors exit 1 with usage") {
  CliRun r = run_cli({"factor", "--bogus"});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"factor", "--kernel", "fio", "--n", "48", "--rank", "2", "--out", "/dev/null"})
            .code == 1);
  CHECK(run_cli({"verify", "--kernel", "nope", "--n", "64", "--rank", "2"}).code == 1);
  CHECK(run_cli({"verify", "--kernel", "fio", "--n", "8192", "--rank", "2"}).code == 1);
  CHECK(run_cli({"apply", "--factors", "/nonexistent.bfac", "--input", "/x", "--output", "/y"})
            .code == 1);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("cli: numerical failure exits 2") {
  CHECK(run_cli({"verify", "--kernel", "fio", "--n", "64", "--rank", "1", "--tol", "1e-30"}).code ==
        2);
}

TEST_CASE("cli: bench output formats") {
  TempDir dir;
  CliRun r = run_cli({"bench", "--kernel", "fio", "--n-list", "64,256", "--rank-list", "2",
                      "--seed", "1", "--samples", "32", "--format", "csv", "--out",
                      dir.file("t.csv")});
  REQUIRE(r.code == 0);
  std::ifstream in(dir.file("t.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 3);
  r = run_cli({"bench", "--kernel", "fio", "--n-list", "64", "--rank-list", "2", "--format",
               "json"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).size() == 1);
  CHECK(run_cli({"bench", "--n-list", "64", "--rank-list", "2", "--format", "xml"}).code == 1);
}
