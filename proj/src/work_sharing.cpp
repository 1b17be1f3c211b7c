#include "forkbench/work_sharing.hpp"

#include <exception>
#include <mutex>

#include "forkbench/error.hpp"

namespace forkbench {

SchedulePolicy resolve_policy(const SchedulePolicy& policy, const Team& team) {
  if (std::holds_alternative<Runtime>(policy)) return team.runtime_schedule();
  return policy;
}

void parallel_sections(Team& team, std::span<const std::function<void()>> tasks) {
  std::mutex failures_mutex;
  std::vector<AggregateError::Failure> failures;
  team.fork([&](std::size_t worker) {
    for (std::size_t t = worker; t < tasks.size(); t += team.size()) {
      try {
        tasks[t]();
      } catch (const std::exception& e) {
        std::lock_guard lock(failures_mutex);
        failures.push_back({t, e.what()});
      } catch (...) {
        std::lock_guard lock(failures_mutex);
        failures.push_back({t, "unknown exception"});
      }
    }
  });
  if (!failures.empty()) throw AggregateError(std::move(failures));
}

std::string_view to_string(ReductionOp op) noexcept {
  switch (op) {
    case ReductionOp::Sum:
      return "sum";
    case ReductionOp::Prod:
      return "prod";
    case ReductionOp::Max:
      return "max";
    case ReductionOp::Min:
      return "min";
  }
  return "sum";
}

ReductionOp parse_reduction_op(std::string_view name) {
  if (name == "sum" || name == "+") return ReductionOp::Sum;
  if (name == "prod" || name == "*") return ReductionOp::Prod;
  if (name == "max") return ReductionOp::Max;
  if (name == "min") return ReductionOp::Min;
  throw ParseError("unknown reduction op '" + std::string(name) + "'");
}

}  // namespace forkbench
