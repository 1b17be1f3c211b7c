#pragma once

#include <bit>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "forkbench/error.hpp"
#include "forkbench/reduction.hpp"

namespace forkbench {

inline constexpr const char* kMpTimeoutEnvVar = "FORKBENCH_MP_TIMEOUT_MS";

using Bytes = std::vector<std::byte>;

struct Envelope {
  std::size_t src = 0;
  std::size_t dest = 0;
  int tag = 0;
  Bytes payload;
};

// Payload codec: little-endian fixed-width scalars, arrays as a bare
// sequence of elements. Decoding checks the declared length.
namespace codec {

template <class T>
void append(Bytes& out, T value) {
  static_assert(std::is_arithmetic_v<T>);
  std::byte raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
  }
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <class T>
T read_at(std::span<const std::byte> bytes, std::size_t offset) {
  std::byte raw[sizeof(T)];
  std::memcpy(raw, bytes.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
  }
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

template <class T>
Bytes encode(T value) {
  Bytes out;
  out.reserve(sizeof(T));
  append(out, value);
  return out;
}

template <class T>
Bytes encode_array(std::span<const T> values) {
  Bytes out;
  out.reserve(values.size() * sizeof(T));
  for (const T& v : values) append(out, v);
  return out;
}

template <class T>
T decode(std::span<const std::byte> bytes) {
  if (bytes.size() != sizeof(T)) {
    throw ContractError("decode: payload of " + std::to_string(bytes.size()) +
                        " bytes, expected " + std::to_string(sizeof(T)));
  }
  return read_at<T>(bytes, 0);
}

template <class T>
std::vector<T> decode_array(std::span<const std::byte> bytes) {
  if (bytes.size() % sizeof(T) != 0) {
    throw ContractError("decode_array: payload of " + std::to_string(bytes.size()) +
                        " bytes is not a whole number of elements");
  }
  std::vector<T> out(bytes.size() / sizeof(T));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = read_at<T>(bytes, i * sizeof(T));
  return out;
}

}  // namespace codec

class Communicator;

/// One rank's view of a Communicator. Owned by the communicator; used by one
/// thread at a time.
class Endpoint {
 public:
  std::size_t rank() const noexcept { return rank_; }
  std::size_t size() const noexcept;

  /// Buffered send; never blocks. `tag` must be non-negative.
  void send(std::size_t dest, int tag, std::span<const std::byte> payload);
  /// Blocks until a message from exactly (src, tag) is available.
  Bytes recv(std::size_t src, int tag);

  /// Every rank returns the root's `value` (linear fan-out).
  Bytes bcast(std::size_t root, std::span<const std::byte> value);

  /// Root receives the fold of all contributions in ascending rank order
  /// starting from the identity; other ranks get nullopt.
  template <class T>
  std::optional<T> reduce(std::size_t root, ReductionOp op, T contribution);

  void barrier();

 private:
  friend class Communicator;
  Endpoint(Communicator* comm, std::size_t rank) : comm_(comm), rank_(rank) {}

  void check_rank(std::size_t rank, const char* what) const;

  Communicator* comm_;
  std::size_t rank_;
};

/// In-process group of `size` ranks with per-(source, tag) FIFO mailboxes.
class Communicator {
 public:
  explicit Communicator(std::size_t size,
                        std::optional<std::chrono::milliseconds> recv_timeout = std::nullopt);

  Communicator(const Communicator&) = delete;
  Communicator& operator=(const Communicator&) = delete;

  std::size_t size() const noexcept { return endpoints_.size(); }
  Endpoint& endpoint(std::size_t rank);

  std::uint64_t sent_count() const;
  std::uint64_t received_count() const;
  /// Messages sent but not yet received, across all mailboxes.
  std::size_t pending_count() const;

  const std::optional<std::chrono::milliseconds>& recv_timeout() const noexcept {
    return recv_timeout_;
  }

 private:
  friend class Endpoint;

  struct Mailbox {
    mutable std::mutex mutex;
    std::condition_variable cv;
    std::map<std::pair<std::size_t, int>, std::deque<Bytes>> queues;
    std::uint64_t received = 0;
  };

  void post(Envelope envelope);
  Bytes take(std::size_t dest, std::size_t src, int tag);

  std::vector<std::unique_ptr<Mailbox>> mailboxes_;
  std::vector<std::unique_ptr<Endpoint>> endpoints_;
  std::optional<std::chrono::milliseconds> recv_timeout_;
  mutable std::mutex stats_mutex_;
  std::uint64_t sent_ = 0;
};

namespace detail {
// Tags below zero are reserved for collectives.
inline constexpr int kBcastTag = -1;
inline constexpr int kReduceTag = -2;
inline constexpr int kBarrierArriveTag = -3;
inline constexpr int kBarrierReleaseTag = -4;
}  // namespace detail

template <class T>
std::optional<T> Endpoint::reduce(std::size_t root, ReductionOp op, T contribution) {
  check_rank(root, "reduce root");
  if (rank_ != root) {
    comm_->post({rank_, root, detail::kReduceTag, codec::encode(contribution)});
    return std::nullopt;
  }
  T acc = identity<T>(op);
  for (std::size_t r = 0; r < size(); ++r) {
    const T value = r == root ? contribution
                              : codec::decode<T>(comm_->take(rank_, r, detail::kReduceTag));
    acc = combine<T>(op, acc, value);
  }
  return acc;
}

}  // namespace forkbench
