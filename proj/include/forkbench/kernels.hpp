#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "forkbench/message_passing.hpp"
#include "forkbench/schedule.hpp"
#include "forkbench/team.hpp"

namespace forkbench {

struct Serial {};
struct WorkShare {
  SchedulePolicy policy;
};
struct MessagePass {};

/// How a kernel is executed: plain loop, work-sharing on a Team, or ranks
/// exchanging messages (one rank per team worker).
using ExecModel = std::variant<Serial, WorkShare, MessagePass>;

/// A team and a communicator of the same size, built once and reused for
/// many kernel invocations so that setup stays outside timed regions.
class ExecContext {
 public:
  /// Team and timeouts configured from the process environment.
  explicit ExecContext(std::size_t parallelism);
  ExecContext(TeamConfig config, std::optional<std::chrono::milliseconds> mp_timeout);

  std::size_t parallelism() const noexcept { return team_.size(); }
  Team& team() noexcept { return team_; }
  Communicator& comm() noexcept { return comm_; }

 private:
  Team team_;
  Communicator comm_;
};

/// Integrand of the classic pi quadrature, 4 / (1 + x^2).
constexpr double pi_integrand(double x) noexcept { return 4.0 / (1.0 + x * x); }

/// Composite Simpson weight (1, 4, 2, ..., 4, 1) for node i of n.
constexpr double simpson_weight(std::size_t i, std::size_t n) noexcept {
  if (i == 0 || i == n) return 1.0;
  return (i % 2 == 1) ? 4.0 : 2.0;
}

/// Serial composite Simpson rule for any integrand on [a, b]; n even, >= 2.
template <class F>
double simpson_rule(F&& f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i <= n; ++i) sum += simpson_weight(i, n) * f(a + static_cast<double>(i) * h);
  return sum * h / 3.0;
}

double vector_sum(std::span<const double> values, const ExecModel& model, ExecContext& ctx);
double vector_sum(std::span<const double> values, const ExecModel& model, std::size_t parallelism);

/// Midpoint rule for the pi integral over [0, 1] with n subintervals.
double pi_rectangle(std::size_t n, const ExecModel& model, ExecContext& ctx);
double pi_rectangle(std::size_t n, const ExecModel& model, std::size_t parallelism);

/// Composite Simpson rule for the pi integral; n must be even and >= 2.
double pi_simpson(std::size_t n, const ExecModel& model, ExecContext& ctx);
double pi_simpson(std::size_t n, const ExecModel& model, std::size_t parallelism);

/// B[i] = mean(A[0..i]), each entry summed from scratch so that iteration i
/// costs O(i). `inner_ops`, when non-null, accumulates the number of inner
/// additions performed.
std::vector<double> running_average_serial(std::span<const double> values,
                                           std::atomic<std::uint64_t>* inner_ops = nullptr);
std::vector<double> running_average(std::span<const double> values, const SchedulePolicy& policy,
                                    ExecContext& ctx,
                                    std::atomic<std::uint64_t>* inner_ops = nullptr);
std::vector<double> running_average(std::span<const double> values, const SchedulePolicy& policy,
                                    std::size_t parallelism);

/// Inclusive scan. Parallel forms scan blocks locally, scan the block
/// totals, then add the offsets.
std::vector<std::int64_t> prefix_sum(std::span<const std::int64_t> values, const ExecModel& model,
                                     ExecContext& ctx);
std::vector<std::int64_t> prefix_sum(std::span<const std::int64_t> values, const ExecModel& model,
                                     std::size_t parallelism);

bool is_prime_trial_division(std::uint64_t candidate) noexcept;

/// Number of primes <= n, testing each candidate by trial division.
std::uint64_t prime_count(std::uint64_t n, const ExecModel& model, ExecContext& ctx);
std::uint64_t prime_count(std::uint64_t n, const ExecModel& model, std::size_t parallelism);

/// Deterministic inputs from a 64-bit seed (mt19937_64 raw bits, so the
/// sequence is identical on every platform).
std::vector<double> random_reals(std::size_t n, std::uint64_t seed);
// Multiples of 1/1024 in [0, 1024): sums of up to 2^33 of them are exact in
// any order.
std::vector<double> random_dyadic_reals(std::size_t n, std::uint64_t seed);
std::vector<std::int64_t> random_integers(std::size_t n, std::uint64_t seed, std::int64_t lo,
                                          std::int64_t hi);

}  // namespace forkbench
