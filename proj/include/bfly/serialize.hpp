#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfly/butterfly.hpp"

namespace bfly {

/// Malformed or truncated factor/vector file. offset() is the byte position
/// where decoding failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kFactorFormatVersion = 1;

// Factor kind tags in the .bfac layout.
enum class FactorKind : std::uint8_t { kUOuter = 0, kG = 1, kMiddle = 2, kH = 3, kVOuter = 4 };

std::vector<std::uint8_t> encode_factors(const ButterflyFactors& f);
ButterflyFactors decode_factors(const std::vector<std::uint8_t>& bytes);

void save_factors(const ButterflyFactors& f, const std::string& path);
ButterflyFactors load_factors(const std::string& path);

/// Vector file: u64 length, then (re, im) binary64 pairs, little-endian.
void save_vector(const Vector& v, const std::string& path);
Vector load_vector(const std::string& path);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace bfly
