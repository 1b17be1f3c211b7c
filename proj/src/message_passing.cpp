#include "forkbench/message_passing.hpp"

#include <string>

namespace forkbench {

std::size_t Endpoint::size() const noexcept { return comm_->size(); }

void Endpoint::check_rank(std::size_t rank, const char* what) const {
  if (rank >= comm_->size()) {
    throw ContractError(std::string(what) + " " + std::to_string(rank) +
                        " out of range for communicator of size " +
                        std::to_string(comm_->size()));
  }
}

void Endpoint::send(std::size_t dest, int tag, std::span<const std::byte> payload) {
  check_rank(dest, "send destination");
  if (tag < 0) throw ContractError("send: tag must be non-negative");
  comm_->post({rank_, dest, tag, Bytes(payload.begin(), payload.end())});
}

Bytes Endpoint::recv(std::size_t src, int tag) {
  check_rank(src, "recv source");
  if (tag < 0) throw ContractError("recv: tag must be non-negative");
  return comm_->take(rank_, src, tag);
}

Bytes Endpoint::bcast(std::size_t root, std::span<const std::byte> value) {
  check_rank(root, "bcast root");
  if (rank_ == root) {
    for (std::size_t r = 0; r < size(); ++r) {
      if (r != root) comm_->post({rank_, r, detail::kBcastTag, Bytes(value.begin(), value.end())});
    }
    return Bytes(value.begin(), value.end());
  }
  return comm_->take(rank_, root, detail::kBcastTag);
}

// Linear gather-release through rank 0.
void Endpoint::barrier() {
  if (size() == 1) return;
  if (rank_ == 0) {
    for (std::size_t r = 1; r < size(); ++r) comm_->take(0, r, detail::kBarrierArriveTag);
    for (std::size_t r = 1; r < size(); ++r) comm_->post({0, r, detail::kBarrierReleaseTag, {}});
    return;
  }
  comm_->post({rank_, 0, detail::kBarrierArriveTag, {}});
  comm_->take(rank_, 0, detail::kBarrierReleaseTag);
}

Communicator::Communicator(std::size_t size, std::optional<std::chrono::milliseconds> recv_timeout)
    : recv_timeout_(recv_timeout) {
  if (size == 0) throw ContractError("communicator needs at least one rank");
  mailboxes_.reserve(size);
  endpoints_.reserve(size);
  for (std::size_t r = 0; r < size; ++r) {
    mailboxes_.push_back(std::make_unique<Mailbox>());
    endpoints_.push_back(std::unique_ptr<Endpoint>(new Endpoint(this, r)));
  }
}

Endpoint& Communicator::endpoint(std::size_t rank) {
  if (rank >= size()) {
    throw ContractError("endpoint rank " + std::to_string(rank) + " out of range");
  }
  return *endpoints_[rank];
}

std::uint64_t Communicator::sent_count() const {
  std::lock_guard lock(stats_mutex_);
  return sent_;
}

std::uint64_t Communicator::received_count() const {
  std::uint64_t total = 0;
  for (const auto& box : mailboxes_) {
    std::lock_guard lock(box->mutex);
    total += box->received;
  }
  return total;
}

std::size_t Communicator::pending_count() const {
  std::size_t total = 0;
  for (const auto& box : mailboxes_) {
    std::lock_guard lock(box->mutex);
    for (const auto& [key, queue] : box->queues) total += queue.size();
  }
  return total;
}

void Communicator::post(Envelope envelope) {
  {
    std::lock_guard lock(stats_mutex_);
    ++sent_;
  }
  Mailbox& box = *mailboxes_[envelope.dest];
  {
    std::lock_guard lock(box.mutex);
    box.queues[{envelope.src, envelope.tag}].push_back(std::move(envelope.payload));
  }
  box.cv.notify_all();
}

Bytes Communicator::take(std::size_t dest, std::size_t src, int tag) {
  Mailbox& box = *mailboxes_[dest];
  std::unique_lock lock(box.mutex);
  auto& queue = box.queues[{src, tag}];
  auto ready = [&] { return !queue.empty(); };
  if (recv_timeout_) {
    if (!box.cv.wait_for(lock, *recv_timeout_, ready)) {
      throw TimeoutError("recv on rank " + std::to_string(dest) + " from " +
                         std::to_string(src) + " tag " + std::to_string(tag) + " timed out after " +
                         std::to_string(recv_timeout_->count()) + " ms (probable deadlock)");
    }
  } else {
    box.cv.wait(lock, ready);
  }
  Bytes payload = std::move(queue.front());
  queue.pop_front();
  ++box.received;
  return payload;
}

}  // namespace forkbench
