#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "forkbench/schedule.hpp"

namespace forkbench {

using StaticPlan = std::vector<std::vector<IterationRange>>;

/// Pre-computes the ranges each worker executes under static scheduling.
/// Without a chunk every worker gets one block of ceil(extent/workers)
/// iterations (trailing workers may get nothing); with a chunk, blocks are
/// dealt round-robin starting at worker 0.
StaticPlan plan_static(std::size_t extent, std::size_t workers, std::optional<std::size_t> chunk);

/// Size of the next guided claim given what is left.
constexpr std::size_t guided_claim_size(std::size_t remaining, std::size_t workers,
                                        std::size_t min_chunk) noexcept {
  const std::size_t share = (remaining + workers - 1) / workers;
  const std::size_t size = share > min_chunk ? share : min_chunk;
  return size < remaining ? size : remaining;
}

struct Claim {
  std::size_t worker = 0;
  IterationRange range;
  friend bool operator==(const Claim&, const Claim&) = default;
};

/// Thread-safe record of which worker claimed which range, in claim order.
class ClaimLog {
 public:
  void record(std::size_t worker, IterationRange range);
  std::vector<Claim> claims() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Claim> claims_;
};

/// Shared state that deals out disjoint, non-empty iteration ranges to the
/// workers of one loop. Safe for concurrent `claim` calls as long as each
/// worker id is used by one thread at a time.
class ChunkSource {
 public:
  /// `policy` must already be resolved; a Runtime policy is a ContractError.
  ChunkSource(const SchedulePolicy& policy, std::size_t extent, std::size_t workers,
              ClaimLog* log = nullptr);

  ChunkSource(const ChunkSource&) = delete;
  ChunkSource& operator=(const ChunkSource&) = delete;

  std::optional<IterationRange> claim(std::size_t worker_id);

  std::size_t extent() const noexcept { return extent_; }
  std::size_t workers() const noexcept { return workers_; }
  const SchedulePolicy& policy() const noexcept { return policy_; }

 private:
  struct alignas(64) PlanCursor {
    std::size_t next = 0;
  };

  std::optional<IterationRange> claim_guided(std::size_t min_chunk);

  SchedulePolicy policy_;
  std::size_t extent_;
  std::size_t workers_;
  ClaimLog* log_;
  StaticPlan plan_;
  std::unique_ptr<PlanCursor[]> plan_cursor_;
  alignas(64) std::atomic<std::size_t> cursor_{0};
};

}  // namespace forkbench
