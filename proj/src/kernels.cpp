#include "forkbench/kernels.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "forkbench/detail/overloaded.hpp"
#include "forkbench/error.hpp"
#include "forkbench/work_sharing.hpp"

namespace forkbench {

using detail::Overloaded;

ExecContext::ExecContext(std::size_t parallelism)
    : ExecContext(TeamConfig::from_environment(parallelism),
                  timeout_from_environment(kMpTimeoutEnvVar)) {}

ExecContext::ExecContext(TeamConfig config, std::optional<std::chrono::milliseconds> mp_timeout)
    : team_(std::move(config)), comm_(team_.size(), mp_timeout) {}

namespace {

// Runs `rank_body(endpoint)` on every rank and returns rank 0's result.
template <class F>
auto run_ranks(ExecContext& ctx, F&& rank_body) {
  auto results = ctx.team().fork_collect(
      [&](std::size_t rank) { return rank_body(ctx.comm().endpoint(rank)); });
  return std::move(results.front());
}

// Strided (cyclic) partial sums of term(i) for i in [0, extent), reduced to
// rank 0 and broadcast back.
template <class T, class Term>
T strided_sum(ExecContext& ctx, std::size_t extent, Term&& term) {
  return run_ranks(ctx, [&](Endpoint& ep) {
    T partial = 0;
    for (std::size_t i = ep.rank(); i < extent; i += ep.size()) partial += term(i);
    auto total = ep.reduce<T>(0, ReductionOp::Sum, partial);
    Bytes encoded = total ? codec::encode(*total) : Bytes{};
    return codec::decode<T>(ep.bcast(0, encoded));
  });
}

template <class T, class Term>
T sum_terms(std::size_t extent, const ExecModel& model, ExecContext* ctx, Term&& term) {
  return std::visit(Overloaded{
                        [&](const Serial&) {
                          T sum = 0;
                          for (std::size_t i = 0; i < extent; ++i) sum += term(i);
                          return sum;
                        },
                        [&](const WorkShare& ws) {
                          return parallel_reduce<T>(ctx->team(), extent, ws.policy,
                                                    ReductionOp::Sum, term);
                        },
                        [&](const MessagePass&) { return strided_sum<T>(*ctx, extent, term); },
                    },
                    model);
}

template <class F>
auto with_context(const ExecModel& model, std::size_t parallelism, F&& f) {
  if (std::holds_alternative<Serial>(model)) {
    ExecContext ctx(1);
    return f(ctx);
  }
  ExecContext ctx(parallelism);
  return f(ctx);
}

}  // namespace

double vector_sum(std::span<const double> values, const ExecModel& model, ExecContext& ctx) {
  return sum_terms<double>(values.size(), model, &ctx, [&](std::size_t i) { return values[i]; });
}

double vector_sum(std::span<const double> values, const ExecModel& model, std::size_t parallelism) {
  return with_context(model, parallelism,
                      [&](ExecContext& ctx) { return vector_sum(values, model, ctx); });
}

double pi_rectangle(std::size_t n, const ExecModel& model, ExecContext& ctx) {
  if (n == 0) throw ContractError("pi_rectangle: n must be >= 1");
  const double count = static_cast<double>(n);
  const double sum = sum_terms<double>(n, model, &ctx, [count](std::size_t i) {
    return pi_integrand((static_cast<double>(i) + 0.5) / count);
  });
  return sum / count;
}

double pi_rectangle(std::size_t n, const ExecModel& model, std::size_t parallelism) {
  return with_context(model, parallelism,
                      [&](ExecContext& ctx) { return pi_rectangle(n, model, ctx); });
}

double pi_simpson(std::size_t n, const ExecModel& model, ExecContext& ctx) {
  if (n < 2 || n % 2 != 0) {
    throw ContractError("pi_simpson: n must be even and >= 2, got " + std::to_string(n));
  }
  const double count = static_cast<double>(n);
  const double sum = sum_terms<double>(n + 1, model, &ctx, [n, count](std::size_t i) {
    return simpson_weight(i, n) * pi_integrand(static_cast<double>(i) / count);
  });
  return sum * (1.0 / count) / 3.0;
}

double pi_simpson(std::size_t n, const ExecModel& model, std::size_t parallelism) {
  return with_context(model, parallelism,
                      [&](ExecContext& ctx) { return pi_simpson(n, model, ctx); });
}

namespace {

double prefix_mean(std::span<const double> values, std::size_t i) {
  double sum = 0.0;
  for (std::size_t j = 0; j <= i; ++j) sum += values[j];
  return sum / static_cast<double>(i + 1);
}

}  // namespace

std::vector<double> running_average_serial(std::span<const double> values,
                                           std::atomic<std::uint64_t>* inner_ops) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = prefix_mean(values, i);
  if (inner_ops != nullptr) {
    const std::uint64_t n = values.size();
    inner_ops->fetch_add(n * (n + 1) / 2, std::memory_order_relaxed);
  }
  return out;
}

std::vector<double> running_average(std::span<const double> values, const SchedulePolicy& policy,
                                    ExecContext& ctx, std::atomic<std::uint64_t>* inner_ops) {
  std::vector<double> out(values.size());
  parallel_for(ctx.team(), values.size(), policy, [&](std::size_t i) {
    out[i] = prefix_mean(values, i);
    if (inner_ops != nullptr) inner_ops->fetch_add(i + 1, std::memory_order_relaxed);
  });
  return out;
}

std::vector<double> running_average(std::span<const double> values, const SchedulePolicy& policy,
                                    std::size_t parallelism) {
  ExecContext ctx(parallelism);
  return running_average(values, policy, ctx);
}

namespace {

std::vector<std::int64_t> prefix_sum_serial(std::span<const std::int64_t> values) {
  std::vector<std::int64_t> out(values.size());
  std::int64_t running = 0;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = running += values[i];
  return out;
}

std::vector<std::int64_t> prefix_sum_work_share(std::span<const std::int64_t> values,
                                                const SchedulePolicy& policy, ExecContext& ctx) {
  struct BlockTotal {
    IterationRange range;
    std::int64_t total;
  };
  struct alignas(64) WorkerBlocks {
    std::vector<BlockTotal> blocks;
  };

  Team& team = ctx.team();
  std::vector<std::int64_t> out(values.size());
  ChunkSource source(resolve_policy(policy, team), values.size(), team.size());
  std::vector<WorkerBlocks> scanned(team.size());
  std::vector<std::int64_t> offsets;  // indexed like `order`
  std::vector<std::size_t> order;     // block starts, ascending

  team.fork([&](std::size_t worker) {
    auto& mine = scanned[worker].blocks;
    worksharing_for_ranges(team, worker, source, [&](IterationRange range) {
      std::int64_t running = 0;
      for (std::size_t i = range.start; i < range.end; ++i) out[i] = running += values[i];
      mine.push_back({range, running});
    });

    if (worker == 0) {
      std::vector<BlockTotal> all;
      for (const auto& w : scanned) all.insert(all.end(), w.blocks.begin(), w.blocks.end());
      std::sort(all.begin(), all.end(),
                [](const BlockTotal& a, const BlockTotal& b) { return a.range.start < b.range.start; });
      std::int64_t carry = 0;
      for (const auto& block : all) {
        order.push_back(block.range.start);
        offsets.push_back(carry);
        carry += block.total;
      }
    }
    team.barrier_wait(worker);

    for (const auto& block : mine) {
      const auto pos = std::lower_bound(order.begin(), order.end(), block.range.start) - order.begin();
      const std::int64_t offset = offsets[static_cast<std::size_t>(pos)];
      if (offset == 0) continue;
      for (std::size_t i = block.range.start; i < block.range.end; ++i) out[i] += offset;
    }
  });
  return out;
}

std::vector<std::int64_t> prefix_sum_message_pass(std::span<const std::int64_t> values,
                                                  ExecContext& ctx) {
  constexpr int kTotalTag = 0;
  constexpr int kOffsetTag = 1;
  constexpr int kBlockTag = 2;
  const std::size_t n = values.size();

  return run_ranks(ctx, [&](Endpoint& ep) {
    const std::size_t p = ep.size();
    auto block_of = [&](std::size_t r) { return IterationRange{r * n / p, (r + 1) * n / p}; };

    const IterationRange mine = block_of(ep.rank());
    std::vector<std::int64_t> local(mine.size());
    std::int64_t running = 0;
    for (std::size_t i = 0; i < local.size(); ++i) local[i] = running += values[mine.start + i];

    std::int64_t offset = 0;
    if (ep.rank() == 0) {
      std::int64_t carry = running;
      for (std::size_t r = 1; r < p; ++r) {
        ep.send(r, kOffsetTag, codec::encode(carry));
        carry += codec::decode<std::int64_t>(ep.recv(r, kTotalTag));
      }
    } else {
      ep.send(0, kTotalTag, codec::encode(running));
      offset = codec::decode<std::int64_t>(ep.recv(0, kOffsetTag));
    }
    for (auto& v : local) v += offset;

    if (ep.rank() != 0) {
      ep.send(0, kBlockTag, codec::encode_array<std::int64_t>(local));
      return std::vector<std::int64_t>{};
    }
    std::vector<std::int64_t> out(n);
    std::copy(local.begin(), local.end(), out.begin());
    for (std::size_t r = 1; r < p; ++r) {
      auto block = codec::decode_array<std::int64_t>(ep.recv(r, kBlockTag));
      std::copy(block.begin(), block.end(), out.begin() + static_cast<std::ptrdiff_t>(block_of(r).start));
    }
    return out;
  });
}

}  // namespace

std::vector<std::int64_t> prefix_sum(std::span<const std::int64_t> values, const ExecModel& model,
                                     ExecContext& ctx) {
  return std::visit(
      Overloaded{
          [&](const Serial&) { return prefix_sum_serial(values); },
          [&](const WorkShare& ws) { return prefix_sum_work_share(values, ws.policy, ctx); },
          [&](const MessagePass&) { return prefix_sum_message_pass(values, ctx); },
      },
      model);
}

std::vector<std::int64_t> prefix_sum(std::span<const std::int64_t> values, const ExecModel& model,
                                     std::size_t parallelism) {
  return with_context(model, parallelism,
                      [&](ExecContext& ctx) { return prefix_sum(values, model, ctx); });
}

bool is_prime_trial_division(std::uint64_t candidate) noexcept {
  if (candidate < 2) return false;
  if (candidate < 4) return true;
  if (candidate % 2 == 0) return false;
  for (std::uint64_t d = 3; d <= candidate / d; d += 2) {
    if (candidate % d == 0) return false;
  }
  return true;
}

std::uint64_t prime_count(std::uint64_t n, const ExecModel& model, ExecContext& ctx) {
  return sum_terms<std::uint64_t>(static_cast<std::size_t>(n) + 1, model, &ctx,
                                  [](std::size_t i) -> std::uint64_t {
                                    return is_prime_trial_division(i) ? 1 : 0;
                                  });
}

std::uint64_t prime_count(std::uint64_t n, const ExecModel& model, std::size_t parallelism) {
  return with_context(model, parallelism,
                      [&](ExecContext& ctx) { return prime_count(n, model, ctx); });
}

std::vector<double> random_reals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return out;
}

std::vector<double> random_dyadic_reals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = static_cast<double>(rng() >> 44) / 1024.0;
  return out;
}

std::vector<std::int64_t> random_integers(std::size_t n, std::uint64_t seed, std::int64_t lo,
                                          std::int64_t hi) {
  if (hi < lo) throw ContractError("random_integers: empty range");
  std::mt19937_64 rng(seed);
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  std::vector<std::int64_t> out(n);
  for (auto& v : out) {
    v = span == 0 ? static_cast<std::int64_t>(rng()) : lo + static_cast<std::int64_t>(rng() % span);
  }
  return out;
}

}  // namespace forkbench
