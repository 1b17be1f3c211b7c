#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "forkbench/chunk_source.hpp"
#include "forkbench/reduction.hpp"
#include "forkbench/schedule.hpp"
#include "forkbench/team.hpp"

namespace forkbench {

// Whether a work-sharing construct ends with a team barrier.
enum class BarrierMode { Wait, NoWait };

/// Replaces Runtime with the team's environment-derived schedule.
SchedulePolicy resolve_policy(const SchedulePolicy& policy, const Team& team);

/// Work-sharing loop over ranges, for use inside a Team::fork body. Every
/// worker of the team must call it with the same source.
template <class RangeBody>
void worksharing_for_ranges(Team& team, std::size_t worker, ChunkSource& source, RangeBody&& body,
                            BarrierMode mode = BarrierMode::Wait) {
  while (auto range = source.claim(worker)) body(*range);
  if (mode == BarrierMode::Wait) team.barrier_wait(worker);
}

/// Per-index form of worksharing_for_ranges.
template <class IndexBody>
void worksharing_for(Team& team, std::size_t worker, ChunkSource& source, IndexBody&& body,
                     BarrierMode mode = BarrierMode::Wait) {
  worksharing_for_ranges(
      team, worker, source,
      [&](IterationRange range) {
        for (std::size_t i = range.start; i < range.end; ++i) body(i);
      },
      mode);
}

/// Combined parallel region + loop: forks the team, shares [0, extent) under
/// `policy` and joins. `log`, when given, records every claim.
template <class IndexBody>
void parallel_for(Team& team, std::size_t extent, const SchedulePolicy& policy, IndexBody&& body,
                  BarrierMode mode = BarrierMode::Wait, ClaimLog* log = nullptr) {
  ChunkSource source(resolve_policy(policy, team), extent, team.size(), log);
  team.fork([&](std::size_t worker) { worksharing_for(team, worker, source, body, mode); });
}

/// Reduces body(i) over [0, extent) with `op`. Each claimed chunk is folded
/// left to right; chunk partials are then combined in ascending chunk order,
/// so the result only depends on the chunk boundaries (fixed for a given
/// policy, extent and team size) and not on which worker ran which chunk.
template <class T, class IndexBody>
T parallel_reduce(Team& team, std::size_t extent, const SchedulePolicy& policy, ReductionOp op,
                  IndexBody&& body) {
  struct alignas(64) Partials {
    std::vector<std::pair<std::size_t, T>> chunks;
  };
  ChunkSource source(resolve_policy(policy, team), extent, team.size());
  std::vector<Partials> partials(team.size());
  team.fork([&](std::size_t worker) {
    auto& mine = partials[worker].chunks;
    while (auto range = source.claim(worker)) {
      T acc = identity<T>(op);
      for (std::size_t i = range->start; i < range->end; ++i) {
        acc = combine<T>(op, acc, static_cast<T>(body(i)));
      }
      mine.emplace_back(range->start, acc);
    }
  });

  std::vector<std::pair<std::size_t, T>> all;
  for (auto& p : partials) all.insert(all.end(), p.chunks.begin(), p.chunks.end());
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  T result = identity<T>(op);
  for (const auto& [start, value] : all) result = combine<T>(op, result, value);
  return result;
}

/// Runs task t on worker t mod team.size(). Failing tasks are reported
/// together, by task index, after every task has run.
void parallel_sections(Team& team, std::span<const std::function<void()>> tasks);

}  // namespace forkbench
