#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "bfly/types.hpp"

namespace bfly {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent substreams from a master seed.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream tags name the stage that consumes a substream.
enum class StreamTag : std::uint64_t {
  kMiddleBlock = 1,
  kProbeCol = 2,
  kProbeRow = 3,
  kSampleSet = 4,
  kBenchInput = 5,
  kKernelInner = 6,
};

// Seed of the substream for (master, tag, a, b). Distinct tuples give
// statistically independent generators; the mapping never depends on
// schedule or thread count.
inline std::uint64_t substream_seed(std::uint64_t master, StreamTag tag, std::uint64_t a = 0,
                                    std::uint64_t b = 0) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ static_cast<std::uint64_t>(tag));
  s = mix64(s ^ (a * 0x100000001b3ULL));
  s = mix64(s ^ (b + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng make_substream(std::uint64_t master, StreamTag tag, std::uint64_t a = 0,
                          std::uint64_t b = 0) {
  return Rng(substream_seed(master, tag, a, b));
}

// Complex standard normal: independent real and imaginary parts, unit variance each.
inline Matrix complex_gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = dist(rng);
      const double im = dist(rng);
      out(i, j) = Complex(re, im);
    }
  }
  return out;
}

}  // namespace bfly
