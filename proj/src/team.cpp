#include "forkbench/team.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <string_view>

#include "forkbench/error.hpp"

namespace forkbench {

std::optional<std::chrono::milliseconds> timeout_from_environment(const char* var) {
  const char* raw = std::getenv(var);
  if (raw == nullptr) return std::nullopt;
  std::string_view text(raw);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  long long ms = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), ms);
  if (ec != std::errc{} || ptr != text.data() + text.size() || ms <= 0) {
    throw ParseError(std::string(var) + ": expected a positive millisecond count, got '" +
                     std::string(text) + "'");
  }
  return std::chrono::milliseconds(ms);
}

TeamConfig TeamConfig::from_environment(std::size_t num_workers) {
  TeamConfig config;
  config.num_workers = num_workers;
  config.env_schedule = schedule_from_environment();
  config.barrier_timeout = timeout_from_environment(kBarrierTimeoutEnvVar);
  return config;
}

Team::Team(TeamConfig config)
    : size_(config.num_workers),
      runtime_schedule_(resolve_schedule_from_env(config.env_schedule)),
      barrier_timeout_(config.barrier_timeout) {
  if (size_ == 0) throw ContractError("team needs at least one worker");
  failures_.resize(size_);
  helpers_.reserve(size_ - 1);
  for (std::size_t id = 1; id < size_; ++id) {
    helpers_.emplace_back([this, id] { helper_loop(id); });
  }
}

Team::~Team() {
  {
    std::lock_guard lock(fork_mutex_);
    stopping_ = true;
  }
  fork_cv_.notify_all();
  for (auto& helper : helpers_) helper.join();
}

void Team::fork(const Body& body) {
  {
    std::lock_guard lock(fork_mutex_);
    if (in_fork_) throw ContractError("nested team_fork is not supported");
    in_fork_ = true;
    body_ = &body;
    std::fill(failures_.begin(), failures_.end(), nullptr);
    outstanding_ = size_ - 1;
    ++fork_epoch_;
  }
  {
    std::lock_guard lock(barrier_mutex_);
    arrived_ = 0;
    broken_ = false;
  }
  fork_cv_.notify_all();

  run_body(0);

  {
    std::unique_lock lock(fork_mutex_);
    join_cv_.wait(lock, [this] { return outstanding_ == 0; });
    body_ = nullptr;
    in_fork_ = false;
  }

  std::vector<AggregateError::Failure> failures;
  std::vector<AggregateError::Failure> broken;
  for (std::size_t id = 0; id < size_; ++id) {
    if (!failures_[id]) continue;
    try {
      std::rethrow_exception(failures_[id]);
    } catch (const BarrierBrokenError& e) {
      broken.push_back({id, e.what()});
    } catch (const std::exception& e) {
      failures.push_back({id, e.what()});
    } catch (...) {
      failures.push_back({id, "unknown exception"});
    }
  }
  if (failures.empty()) failures = std::move(broken);
  if (!failures.empty()) throw AggregateError(std::move(failures));
}

void Team::helper_loop(std::size_t id) {
  std::uint64_t seen = 0;
  for (;;) {
    {
      std::unique_lock lock(fork_mutex_);
      fork_cv_.wait(lock, [&] { return stopping_ || fork_epoch_ != seen; });
      if (stopping_) return;
      seen = fork_epoch_;
    }
    run_body(id);
    {
      std::lock_guard lock(fork_mutex_);
      if (--outstanding_ == 0) join_cv_.notify_one();
    }
  }
}

void Team::run_body(std::size_t id) {
  try {
    (*body_)(id);
  } catch (...) {
    failures_[id] = std::current_exception();
    // Waiters at a barrier would otherwise never be released.
    {
      std::lock_guard lock(barrier_mutex_);
      broken_ = true;
    }
    barrier_cv_.notify_all();
  }
}

void Team::barrier_wait(std::size_t worker_id) {
  if (worker_id >= size_) {
    throw ContractError("barrier_wait: worker id " + std::to_string(worker_id) +
                        " out of range for team of " + std::to_string(size_));
  }
  std::unique_lock lock(barrier_mutex_);
  if (broken_) throw BarrierBrokenError("barrier broken by a failing worker");
  const std::uint64_t generation = generation_;
  if (++arrived_ == size_) {
    arrived_ = 0;
    ++generation_;
    lock.unlock();
    barrier_cv_.notify_all();
    return;
  }
  auto released = [&] { return generation_ != generation || broken_; };
  bool ok = true;
  if (barrier_timeout_) {
    ok = barrier_cv_.wait_for(lock, *barrier_timeout_, released);
  } else {
    barrier_cv_.wait(lock, released);
  }
  if (generation_ != generation) return;
  --arrived_;
  if (!ok) {
    throw TimeoutError("barrier_wait timed out after " +
                       std::to_string(barrier_timeout_->count()) + " ms on worker " +
                       std::to_string(worker_id) + " (probable deadlock)");
  }
  throw BarrierBrokenError("barrier broken by a failing worker");
}

std::uint64_t Team::barrier_generation() const {
  std::lock_guard lock(barrier_mutex_);
  return generation_;
}

}  // namespace forkbench
