#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "bfly/bench.hpp"
#include "bfly/butterfly.hpp"
#include "bfly/cli.hpp"
#include "bfly/kernels.hpp"
#include "bfly/serialize.hpp"

namespace py = pybind11;
using namespace bfly;

namespace {

// Owns the kernel so the oracle stays alive for the lifetime of the Python object.
struct PyKernel {
  KernelInstance k;
};

FactorizeOptions make_options(std::uint64_t seed, unsigned threads, Index p, Index q, Index iters) {
  FactorizeOptions o;
  o.seed = seed;
  o.threads = threads;
  o.params.p = p;
  o.params.q = q;
  o.params.iters = iters;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Butterfly factorization of complementary low-rank matrices";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<DyadicPartition>(m, "Partition")
      .def(py::init<Index, int>(), py::arg("n"), py::arg("levels"))
      .def_property_readonly("n", &DyadicPartition::n)
      .def_property_readonly("levels", &DyadicPartition::levels)
      .def_property_readonly("leaf_size", &DyadicPartition::leaf_size);
  m.def("make_partition", &make_partition, py::arg("n"), py::arg("target_leaf") = kDefaultTargetLeaf);

  py::class_<ButterflyFactors>(m, "Factors")
      .def_property_readonly("n", &ButterflyFactors::n)
      .def_readonly("rank", &ButterflyFactors::rank)
      .def_readonly("partition", &ButterflyFactors::partition)
      .def("nnz", [](const ButterflyFactors& f) { return nnz_report(f).total(); })
      .def("apply", [](const ButterflyFactors& f, const Matrix& g) { return bfly::apply(f, g); })
      .def("apply_adjoint",
           [](const ButterflyFactors& f, const Matrix& g) { return bfly::apply_adjoint(f, g); })
      .def("to_dense", &to_dense)
      .def("save", [](const ButterflyFactors& f, const std::string& path) { save_factors(f, path); })
      .def("to_bytes", [](const ButterflyFactors& f) {
        const auto b = encode_factors(f);
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      });
  m.def("load_factors", &load_factors, py::arg("path"));
  m.def("factors_from_bytes", [](const py::bytes& b) {
    const std::string s = b;
    return decode_factors(std::vector<std::uint8_t>(s.begin(), s.end()));
  });

  py::class_<PyKernel>(m, "Kernel")
      .def_property_readonly("n", [](const PyKernel& k) { return k.k.n; })
      .def_property_readonly("name", [](const PyKernel& k) { return std::string(to_string(k.k.kind)); })
      .def("entry",
           [](const PyKernel& k, Index i, Index j) {
             if (!k.k.entries) throw std::invalid_argument("kernel has no entry access");
             return k.k.entries->entry(i, j);
           })
      .def("matvec", [](const PyKernel& k, const Matrix& g) {
        if (k.k.composed) return k.k.composed->apply(g);
        if (k.k.dense_op) return k.k.dense_op->apply(g);
        throw std::invalid_argument("kernel has no operator access at this size");
      });
  m.def(
      "make_kernel",
      [](const std::string& name, Index n, std::uint64_t seed, Index inner_rank, unsigned threads,
         bool dense_operator) {
        KernelOptions o;
        o.seed = seed;
        o.inner_rank = inner_rank;
        o.threads = threads;
        o.dense_operator = dense_operator;
        return PyKernel{make_kernel(parse_kernel(name), n, o)};
      },
      py::arg("name"), py::arg("n"), py::arg("seed") = 0, py::arg("inner_rank") = kDefaultInnerRank,
      py::arg("threads") = 1, py::arg("dense_operator") = false);

  m.def(
      "factorize",
      [](const PyKernel& k, Index rank, std::optional<std::string> mode, Index target_leaf,
         std::uint64_t seed, unsigned threads, Index p, Index q, Index iters) {
        const FactorMode fm = mode ? parse_factor_mode(*mode) : k.k.default_mode();
        const DyadicPartition part = make_partition(k.k.n, target_leaf);
        py::gil_scoped_release release;
        return factorize(k.k.oracle(fm), part, rank, fm, make_options(seed, threads, p, q, iters));
      },
      py::arg("kernel"), py::arg("rank"), py::arg("mode") = py::none(),
      py::arg("target_leaf") = kDefaultTargetLeaf, py::arg("seed") = 0, py::arg("threads") = 1,
      py::arg("p") = OversamplingParams{}.p, py::arg("q") = OversamplingParams{}.q,
      py::arg("iters") = OversamplingParams{}.iters);
  m.def(
      "factorize_dense",
      [](const Matrix& k, Index rank, const std::string& mode, Index target_leaf, std::uint64_t seed) {
        if (k.rows() != k.cols()) throw std::invalid_argument("matrix must be square");
        const FactorMode fm = parse_factor_mode(mode);
        const DyadicPartition part = make_partition(k.rows(), target_leaf);
        const FactorizeOptions o = make_options(seed, 1, 5, 3, 3);
        if (fm == FactorMode::kMatvec) {
          const DenseOperator op(k);
          return factorize(MatrixOracle::operators(op), part, rank, fm, o);
        }
        const DenseEntryOracle entries(k);
        return factorize(MatrixOracle::entries(entries), part, rank, fm, o);
      },
      py::arg("matrix"), py::arg("rank"), py::arg("mode") = "sampling",
      py::arg("target_leaf") = kDefaultTargetLeaf, py::arg("seed") = 0);

  m.def(
      "estimate_eps_a",
      [](const ButterflyFactors& f, const PyKernel& k, Index samples, std::uint64_t seed) {
        Rng rng(seed);
        const EpsEstimate e = estimate_eps_a(f, reference_for(k.k), k.k.n, samples, rng);
        py::dict d;
        d["value"] = e.value;
        d["absolute"] = e.absolute;
        d["samples"] = e.samples;
        d["clamped"] = e.clamped;
        return d;
      },
      py::arg("factors"), py::arg("kernel"), py::arg("samples") = kDefaultSampleCount,
      py::arg("seed") = 0);

  m.def(
      "bench",
      [](const std::string& kernel, std::vector<Index> n_list, std::vector<Index> rank_list,
         std::uint64_t seed, Index samples) {
        BenchConfig c;
        c.kernel = parse_kernel(kernel);
        c.n_list = std::move(n_list);
        c.rank_list = std::move(rank_list);
        c.seed = seed;
        c.sample_count = samples;
        py::gil_scoped_release release;
        return run_bench(c).to_json();
      },
      py::arg("kernel"), py::arg("n_list"), py::arg("rank_list"), py::arg("seed") = 0,
      py::arg("samples") = kDefaultSampleCount);

  m.def("dft", [](const Matrix& g) { return dft_apply(g.rows(), g, DftDirection::kForward); });
  m.def("hankel1", &hankel1, py::arg("order"), py::arg("x"));

  m.def(
      "cli",
      [](std::vector<std::string> args) {
        std::ostringstream out, err;
        const int code = cli_main(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
