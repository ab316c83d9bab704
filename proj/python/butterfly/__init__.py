"""Butterfly factorization of complementary low-rank matrices."""

from ._core import (
    Factors,
    FormatError,
    IoError,
    Kernel,
    Partition,
    bench,
    cli,
    dft,
    estimate_eps_a,
    factorize,
    factorize_dense,
    factors_from_bytes,
    hankel1,
    load_factors,
    make_kernel,
    make_partition,
)

__all__ = [
    "Factors",
    "FormatError",
    "IoError",
    "Kernel",
    "Partition",
    "bench",
    "cli",
    "dft",
    "estimate_eps_a",
    "factorize",
    "factorize_dense",
    "factors_from_bytes",
    "hankel1",
    "load_factors",
    "make_kernel",
    "make_partition",
]
