#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace forkbench {

/// 64-bit FNV-1a.
class Fnv1a {
 public:
  static constexpr std::uint64_t kOffsetBasis = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

  void update(std::span<const std::byte> bytes) noexcept;
  void update_u64(std::uint64_t value) noexcept;
  std::uint64_t value() const noexcept { return state_; }

 private:
  std::uint64_t state_ = kOffsetBasis;
};

/// Rounds to `digits` significant decimal digits.
double round_significant(double value, int digits = 12);

// Reals are rounded to 12 significant digits, then hashed as little-endian
// IEEE-754 bit patterns. Integers are hashed as little-endian 64-bit words.
std::uint64_t checksum_real(double value);
std::uint64_t checksum_reals(std::span<const double> values);
std::uint64_t checksum_integer(std::int64_t value);
std::uint64_t checksum_integers(std::span<const std::int64_t> values);
std::uint64_t checksum_bytes(std::span<const std::uint8_t> values);

/// 16 lowercase hex digits.
std::string format_checksum(std::uint64_t value);
std::uint64_t parse_checksum(const std::string& text);

}  // namespace forkbench
