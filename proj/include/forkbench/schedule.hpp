#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace forkbench {

/// Environment variable consulted by the `runtime` schedule.
inline constexpr const char* kScheduleEnvVar = "FORKBENCH_SCHEDULE";

// One block per worker when `chunk` is absent, otherwise round-robin blocks
// of `chunk` iterations.
struct Static {
  std::optional<std::size_t> chunk;
  friend bool operator==(const Static&, const Static&) = default;
};

struct Dynamic {
  std::size_t chunk = 1;
  friend bool operator==(const Dynamic&, const Dynamic&) = default;
};

// Claims max(min_chunk, ceil(remaining / workers)) iterations at a time.
struct Guided {
  std::size_t min_chunk = 1;
  friend bool operator==(const Guided&, const Guided&) = default;
};

// Placeholder resolved from FORKBENCH_SCHEDULE before any chunk is planned.
struct Runtime {
  friend bool operator==(const Runtime&, const Runtime&) = default;
};

using SchedulePolicy = std::variant<Static, Dynamic, Guided, Runtime>;

/// Half-open iteration range [start, end).
struct IterationRange {
  std::size_t start = 0;
  std::size_t end = 0;

  constexpr std::size_t size() const noexcept { return end - start; }
  constexpr bool empty() const noexcept { return start == end; }
  friend bool operator==(const IterationRange&, const IterationRange&) = default;
};

std::string_view policy_name(const SchedulePolicy& policy) noexcept;
std::optional<std::size_t> policy_chunk(const SchedulePolicy& policy) noexcept;

/// Renders the policy in the environment grammar, e.g. "guided,4".
std::string to_string(const SchedulePolicy& policy);

/// Throws ContractError when a present chunk is zero.
void validate(const SchedulePolicy& policy);

/// Builds a policy from a name ("static", "dynamic", "guided", "runtime") and
/// an optional chunk. Dynamic and Guided default their chunk to 1.
SchedulePolicy make_policy(std::string_view name, std::optional<std::size_t> chunk);

/// Parses `policy[,chunk]` (case-insensitive, whitespace ignored). An absent
/// or blank value yields Static{}. `runtime` is rejected since it would
/// resolve to itself.
SchedulePolicy resolve_schedule_from_env(std::optional<std::string_view> env_value);

/// Reads FORKBENCH_SCHEDULE from the process environment.
std::optional<std::string> schedule_from_environment();

}  // namespace forkbench
