#include "forkbench/checksum.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "forkbench/error.hpp"

namespace forkbench {

void Fnv1a::update(std::span<const std::byte> bytes) noexcept {
  for (std::byte b : bytes) {
    state_ ^= static_cast<std::uint64_t>(b);
    state_ *= kPrime;
  }
}

void Fnv1a::update_u64(std::uint64_t value) noexcept {
  std::byte raw[8];
  for (int i = 0; i < 8; ++i) raw[i] = static_cast<std::byte>((value >> (8 * i)) & 0xffU);
  update(raw);
}

double round_significant(double value, int digits) {
  if (value == 0.0) return 0.0;  // folds -0.0 into +0.0
  if (!std::isfinite(value)) return value;
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*e", digits - 1, value);
  return std::strtod(buffer, nullptr);
}

std::uint64_t checksum_real(double value) { return checksum_reals({&value, 1}); }

std::uint64_t checksum_reals(std::span<const double> values) {
  Fnv1a hash;
  for (double v : values) hash.update_u64(std::bit_cast<std::uint64_t>(round_significant(v)));
  return hash.value();
}

std::uint64_t checksum_integer(std::int64_t value) { return checksum_integers({&value, 1}); }

std::uint64_t checksum_integers(std::span<const std::int64_t> values) {
  Fnv1a hash;
  for (std::int64_t v : values) hash.update_u64(static_cast<std::uint64_t>(v));
  return hash.value();
}

std::uint64_t checksum_bytes(std::span<const std::uint8_t> values) {
  Fnv1a hash;
  hash.update(std::as_bytes(values));
  return hash.value();
}

std::string format_checksum(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

std::uint64_t parse_checksum(const std::string& text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, 16);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError("invalid checksum '" + text + "'");
  }
  return value;
}

}  // namespace forkbench
