#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "forkbench/schedule.hpp"

namespace forkbench {

inline constexpr const char* kBarrierTimeoutEnvVar = "FORKBENCH_BARRIER_TIMEOUT_MS";

struct TeamConfig {
  std::size_t num_workers = 1;
  // Raw FORKBENCH_SCHEDULE value; parsed when the team is created.
  std::optional<std::string> env_schedule;
  // Test-mode barrier timeout. Absent means wait forever.
  std::optional<std::chrono::milliseconds> barrier_timeout;

  /// Fills `env_schedule` and `barrier_timeout` from the process environment.
  static TeamConfig from_environment(std::size_t num_workers);
};

/// Parses a millisecond timeout from an environment variable. Unset or blank
/// yields nullopt; anything else must be a positive integer.
std::optional<std::chrono::milliseconds> timeout_from_environment(const char* var);

/// A fork-join worker team. Worker 0 is the calling (master) thread; workers
/// 1..size-1 are helper threads parked between forks. A Team is created and
/// forked from one controlling thread; its barrier is used from inside fork
/// bodies.
class Team {
 public:
  using Body = std::function<void(std::size_t worker_id)>;

  explicit Team(TeamConfig config);
  ~Team();

  Team(const Team&) = delete;
  Team& operator=(const Team&) = delete;

  std::size_t size() const noexcept { return size_; }

  /// Schedule used for `Runtime` policies, resolved at construction.
  const SchedulePolicy& runtime_schedule() const noexcept { return runtime_schedule_; }

  /// Runs `body(id)` once for every id in [0, size) and returns after all of
  /// them finish. Failures are rethrown afterwards as one AggregateError.
  void fork(const Body& body);

  /// Like fork, but collects each worker's return value indexed by id.
  template <class F>
  auto fork_collect(F&& body) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<std::optional<R>> slots(size_);
    fork([&](std::size_t id) { slots[id].emplace(body(id)); });
    std::vector<R> out;
    out.reserve(size_);
    for (auto& slot : slots) out.push_back(std::move(*slot));
    return out;
  }

  /// Blocks until every worker of the team has reached the same barrier
  /// episode. Throws TimeoutError if the configured timeout expires and
  /// Error if another worker failed while this one was waiting.
  void barrier_wait(std::size_t worker_id);

  std::uint64_t barrier_generation() const;

 private:
  void helper_loop(std::size_t id);
  void run_body(std::size_t id);

  std::size_t size_;
  SchedulePolicy runtime_schedule_;
  std::optional<std::chrono::milliseconds> barrier_timeout_;

  std::mutex fork_mutex_;
  std::condition_variable fork_cv_;
  std::condition_variable join_cv_;
  const Body* body_ = nullptr;
  std::uint64_t fork_epoch_ = 0;
  std::size_t outstanding_ = 0;
  bool stopping_ = false;
  bool in_fork_ = false;
  std::vector<std::exception_ptr> failures_;

  mutable std::mutex barrier_mutex_;
  std::condition_variable barrier_cv_;
  std::size_t arrived_ = 0;
  std::uint64_t generation_ = 0;
  bool broken_ = false;

  std::vector<std::thread> helpers_;
};

}  // namespace forkbench
