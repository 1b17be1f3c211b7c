#include "forkbench/chunk_source.hpp"

#include <algorithm>
#include <string>

#include "forkbench/detail/overloaded.hpp"
#include "forkbench/error.hpp"

namespace forkbench {

StaticPlan plan_static(std::size_t extent, std::size_t workers, std::optional<std::size_t> chunk) {
  if (workers == 0) throw ContractError("plan_static: workers must be >= 1");
  if (chunk && *chunk == 0) throw ContractError("plan_static: chunk must be >= 1");

  StaticPlan plan(workers);
  if (!chunk) {
    const std::size_t block = (extent + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t start = std::min(w * block, extent);
      const std::size_t end = std::min(start + block, extent);
      if (start < end) plan[w].push_back({start, end});
    }
    return plan;
  }
  std::size_t block = 0;
  for (std::size_t start = 0; start < extent; start += *chunk, ++block) {
    plan[block % workers].push_back({start, std::min(start + *chunk, extent)});
  }
  return plan;
}

void ClaimLog::record(std::size_t worker, IterationRange range) {
  std::lock_guard lock(mutex_);
  claims_.push_back({worker, range});
}

std::vector<Claim> ClaimLog::claims() const {
  std::lock_guard lock(mutex_);
  return claims_;
}

ChunkSource::ChunkSource(const SchedulePolicy& policy, std::size_t extent, std::size_t workers,
                         ClaimLog* log)
    : policy_(policy), extent_(extent), workers_(workers), log_(log) {
  if (std::holds_alternative<Runtime>(policy_)) {
    throw ContractError("ChunkSource: runtime schedule must be resolved before planning");
  }
  if (workers_ == 0) throw ContractError("ChunkSource: workers must be >= 1");
  validate(policy_);
  if (const auto* s = std::get_if<Static>(&policy_)) {
    plan_ = plan_static(extent_, workers_, s->chunk);
    plan_cursor_ = std::make_unique<PlanCursor[]>(workers_);
  }
}

std::optional<IterationRange> ChunkSource::claim(std::size_t worker_id) {
  if (worker_id >= workers_) {
    throw ContractError("claim_chunk: worker id " + std::to_string(worker_id) +
                        " out of range for " + std::to_string(workers_) + " workers");
  }
  std::optional<IterationRange> range = std::visit(
      detail::Overloaded{
          [&](const Static&) -> std::optional<IterationRange> {
            auto& next = plan_cursor_[worker_id].next;
            const auto& mine = plan_[worker_id];
            if (next == mine.size()) return std::nullopt;
            return mine[next++];
          },
          [&](const Dynamic& d) -> std::optional<IterationRange> {
            const std::size_t start = cursor_.fetch_add(d.chunk, std::memory_order_relaxed);
            if (start >= extent_) return std::nullopt;
            return IterationRange{start, std::min(start + d.chunk, extent_)};
          },
          [&](const Guided& g) { return claim_guided(g.min_chunk); },
          [](const Runtime&) -> std::optional<IterationRange> { return std::nullopt; },
      },
      policy_);
  if (range && log_ != nullptr) log_->record(worker_id, *range);
  return range;
}

std::optional<IterationRange> ChunkSource::claim_guided(std::size_t min_chunk) {
  std::size_t start = cursor_.load(std::memory_order_relaxed);
  for (;;) {
    if (start >= extent_) return std::nullopt;
    const std::size_t size = guided_claim_size(extent_ - start, workers_, min_chunk);
    if (cursor_.compare_exchange_weak(start, start + size, std::memory_order_relaxed)) {
      return IterationRange{start, start + size};
    }
  }
}

}  // namespace forkbench
