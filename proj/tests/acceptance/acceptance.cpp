// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <sys/wait.h>

#include "forkbench/bench.hpp"
#include "forkbench/kernels.hpp"
#include "forkbench/life.hpp"
#include "forkbench/message_passing.hpp"
#include "forkbench/metrics.hpp"
#include "forkbench/placement.hpp"
#include "forkbench/work_sharing.hpp"

using namespace forkbench;
using Clock = std::chrono::steady_clock;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> check;
};

Outcome pass(std::string detail) { return {Status::Pass, std::move(detail)}; }
Outcome fail(std::string detail) { return {Status::Fail, std::move(detail)}; }

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

TeamConfig team_config(std::size_t workers) {
  TeamConfig c;
  c.num_workers = workers;
  c.env_schedule = "dynamic,3";
  return c;
}

std::vector<SchedulePolicy> coverage_policies() {
  return {Static{}, Static{1}, Static{2}, Static{7}, Dynamic{1}, Dynamic{3}, Guided{1}, Guided{4}};
}

std::vector<SchedulePolicy> reduce_policies() {
  return {Static{}, Static{7}, Dynamic{1}, Dynamic{16}, Guided{1}, Guided{4}, Runtime{}};
}

// 1: disjoint exact cover, checked both from a single claimer and under
// concurrent claims from a live team.
Outcome schedule_coverage() {
  std::size_t cases = 0;
  for (const auto& policy : coverage_policies()) {
    for (std::size_t extent : {0, 1, 7, 100, 1000}) {
      for (std::size_t workers : {1, 2, 3, 8}) {
        ++cases;
        for (bool concurrent : {false, true}) {
          ChunkSource source(policy, extent, workers);
          std::vector<std::atomic<int>> hits(extent);
          std::atomic<bool> empty_range{false};
          auto drain = [&](std::size_t w) {
            while (auto r = source.claim(w)) {
              if (r->empty()) empty_range = true;
              for (std::size_t i = r->start; i < r->end; ++i) hits[i].fetch_add(1);
            }
          };
          if (concurrent) {
            Team team(team_config(workers));
            team.fork(drain);
          } else {
            for (std::size_t w = 0; w < workers; ++w) drain(w);
          }
          for (std::size_t i = 0; i < extent; ++i) {
            if (hits[i].load() != 1) {
              return fail("policy " + to_string(policy) + " extent " + std::to_string(extent) + " workers " +
                          std::to_string(workers) + ": index " + std::to_string(i) + " issued " +
                          std::to_string(hits[i].load()) + " times");
            }
          }
          if (empty_range) return fail("empty range issued for " + to_string(policy));
        }
      }
    }
  }
  return pass(std::to_string(cases) + " cases, sequential and concurrent");
}

// 2
Outcome guided_sequence() {
  const std::vector<std::size_t> expected{25, 19, 14, 11, 8, 6, 5, 3, 3, 2, 1, 1, 1, 1};
  ChunkSource source(Guided{1}, 100, 4);
  std::vector<std::size_t> got;
  while (auto r = source.claim(0)) got.push_back(r->size());
  std::string text;
  for (auto s : got) text += (text.empty() ? "" : ",") + std::to_string(s);
  if (got != expected) return fail("got " + text);
  return pass(text);
}

// 3
Outcome reduction_oracle() {
  std::size_t runs = 0;
  for (const auto& policy : reduce_policies()) {
    for (std::size_t p : {1, 2, 4, 8}) {
      Team team(team_config(p));
      const auto sum = parallel_reduce<std::int64_t>(team, 1000, policy, ReductionOp::Sum,
                                                     [](std::size_t i) { return static_cast<std::int64_t>(i); });
      ++runs;
      if (sum != 499500) {
        return fail(to_string(policy) + " p=" + std::to_string(p) + " gave " + std::to_string(sum));
      }
    }
  }
  return pass(std::to_string(runs) + " runs, all 499500");
}

// 4
Outcome pi_order() {
  const double pi = std::numbers::pi;
  std::vector<std::string> problems;
  const double simpson_err = std::abs(pi_simpson(1000, Serial{}, 1) - pi);
  if (!(simpson_err < 1e-10)) problems.push_back("simpson(1000) error " + fmt("%.3e", simpson_err));

  std::string simpson_ratios, midpoint_ratios;
  for (std::size_t n : {10, 20, 40}) {
    const double s = std::abs(pi_simpson(n, Serial{}, 1) - pi) / std::abs(pi_simpson(2 * n, Serial{}, 1) - pi);
    const double m = std::abs(pi_rectangle(n, Serial{}, 1) - pi) / std::abs(pi_rectangle(2 * n, Serial{}, 1) - pi);
    simpson_ratios += (simpson_ratios.empty() ? "" : ",") + fmt("%.2f", s);
    midpoint_ratios += (midpoint_ratios.empty() ? "" : ",") + fmt("%.2f", m);
    if (!(s >= 12.0 && s <= 20.0)) problems.push_back("simpson ratio n=" + std::to_string(n) + " is " + fmt("%.2f", s) + " (want [12,20])");
    if (!(m >= 3.5 && m <= 4.5)) problems.push_back("midpoint ratio n=" + std::to_string(n) + " is " + fmt("%.2f", m) + " (want [3.5,4.5])");
  }
  std::string detail = "simpson(1000) err " + fmt("%.2e", simpson_err) + "; simpson ratios " + simpson_ratios +
                       "; midpoint ratios " + midpoint_ratios;
  if (!problems.empty()) {
    for (const auto& p : problems) detail += "; " + p;
    return fail(detail);
  }
  return pass(detail);
}

// 5
Outcome life_equivalence() {
  const Grid start = Grid::random(64, 64, Boundary::Dead, 2024);
  Grid oracle = start;
  for (int s = 0; s < 100; ++s) oracle = life_step_serial(oracle);

  const std::vector<SchedulePolicy> policies{Static{}, Dynamic{1}, Guided{1}, Runtime{}};
  std::size_t runs = 0;
  for (std::size_t p : {1, 2, 4}) {
    // Block2D 2x2 needs four parts; smaller p use the nearest square layout.
    const std::vector<Decomposition> decomps{RowBlock{}, ColBlock{},
                                             p == 4 ? Decomposition{Block2D{2, 2}} : Decomposition{Block2D{0, 0}}};
    ExecContext ctx(team_config(p), std::nullopt);
    for (const auto& d : decomps) {
      std::vector<ExecModel> models;
      for (const auto& policy : policies) models.push_back(WorkShare{policy});
      models.push_back(MessagePass{});
      for (const auto& model : models) {
        ++runs;
        if (life_run(start, 100, d, model, ctx) != oracle) {
          return fail("mismatch for decomposition " + to_string(d) + " p=" + std::to_string(p));
        }
      }
    }
  }

  Grid glider(16, 16, Boundary::Toroidal);
  for (auto [r, c] : {std::pair{0, 1}, {1, 2}, {2, 0}, {2, 1}, {2, 2}}) glider.set(r, c, true);
  Grid g = glider;
  for (int s = 0; s < 64; ++s) g = life_step_serial(g);
  // A translate of the start: some (dr, dc) shift maps start onto the result.
  bool translate = false;
  for (std::size_t dr = 0; dr < 16 && !translate; ++dr) {
    for (std::size_t dc = 0; dc < 16 && !translate; ++dc) {
      bool all = true;
      for (std::size_t r = 0; r < 16 && all; ++r) {
        for (std::size_t c = 0; c < 16 && all; ++c) all = g.alive((r + dr) % 16, (c + dc) % 16) == glider.alive(r, c);
      }
      translate = all;
    }
  }
  if (!translate) return fail("glider after 64 steps is not a translate of the start");
  for (std::size_t p : {1, 2, 4}) {
    for (const auto& model : {ExecModel{WorkShare{Dynamic{1}}}, ExecModel{MessagePass{}}}) {
      for (const auto& d : {Decomposition{RowBlock{}}, Decomposition{ColBlock{}}, Decomposition{Block2D{0, 0}}}) {
        ++runs;
        if (life_run(glider, 64, d, model, p) != g) return fail("glider mismatch for " + to_string(d));
      }
    }
  }
  return pass(std::to_string(runs) + " parallel runs bit-identical to the serial oracle; glider translates");
}

void run_ranks(Communicator& comm, const std::function<void(Endpoint&)>& body) {
  std::vector<std::thread> threads;
  for (std::size_t r = 0; r < comm.size(); ++r) threads.emplace_back([&, r] { body(comm.endpoint(r)); });
  for (auto& t : threads) t.join();
}

// 6
Outcome message_semantics() {
  constexpr std::size_t kRanks = 8;
  constexpr std::uint32_t kMessages = 10000;
  {
    Communicator comm(kRanks, std::chrono::milliseconds(30000));
    std::atomic<std::uint64_t> reordered{0};
    run_ranks(comm, [&](Endpoint& ep) {
      for (std::size_t d = 0; d < kRanks; ++d) {
        if (d == ep.rank()) continue;
        for (std::uint32_t i = 0; i < kMessages; ++i) ep.send(d, 0, codec::encode(i));
      }
      for (std::size_t s = 0; s < kRanks; ++s) {
        if (s == ep.rank()) continue;
        for (std::uint32_t i = 0; i < kMessages; ++i) {
          if (codec::decode<std::uint32_t>(ep.recv(s, 0)) != i) reordered.fetch_add(1);
        }
      }
    });
    if (reordered.load() != 0) return fail(std::to_string(reordered.load()) + " messages out of order");
    if (comm.received_count() != comm.sent_count() || comm.pending_count() != 0) return fail("messages lost");
  }

  for (std::size_t p = 1; p <= kRanks; ++p) {
    for (std::size_t root = 0; root < p; ++root) {
      Communicator comm(p);
      std::atomic<int> disagree{0};
      run_ranks(comm, [&](Endpoint& ep) {
        const Bytes mine = ep.rank() == root ? codec::encode<std::uint64_t>(1000 + root) : Bytes{};
        if (codec::decode<std::uint64_t>(ep.bcast(root, mine)) != 1000 + root) disagree.fetch_add(1);
      });
      if (disagree.load() != 0) return fail("bcast disagreement p=" + std::to_string(p) + " root=" + std::to_string(root));
    }
  }

  std::mt19937_64 rng(6);
  for (std::size_t p = 1; p <= kRanks; ++p) {
    for (auto op : {ReductionOp::Sum, ReductionOp::Max, ReductionOp::Min, ReductionOp::Prod}) {
      std::vector<std::int64_t> values(p);
      for (auto& v : values) v = static_cast<std::int64_t>(rng() % 19) - 9;
      std::int64_t fold = identity<std::int64_t>(op);
      for (auto v : values) fold = combine(op, fold, v);
      const std::size_t root = p - 1;
      Communicator comm(p);
      std::optional<std::int64_t> got;
      run_ranks(comm, [&](Endpoint& ep) {
        if (auto r = ep.reduce<std::int64_t>(root, op, values[ep.rank()])) got = r;
      });
      if (got != fold) return fail("reduce " + std::string(to_string(op)) + " p=" + std::to_string(p));
    }
  }
  return pass("FIFO 8 ranks x 56 pairs x 10000 messages, no reordering; bcast all roots p<=8; reduce folds exact");
}

// 7
Outcome amdahl_round_trip() {
  double worst = 0.0;
  for (double f : {0.0, 0.1, 0.25, 0.5, 1.0}) {
    std::vector<Measurement> ms{{1, Duration{1e6}, 0, 0}};
    for (std::size_t p : {2, 4, 8, 16}) {
      ms.push_back({p, Duration{1e6 * (f + (1.0 - f) / static_cast<double>(p))}, 0, 0});
    }
    worst = std::max(worst, std::abs(amdahl_fraction(ms) - f));
  }
  if (!(worst <= 1e-9)) return fail("max error " + fmt("%.3e", worst));
  return pass("max error " + fmt("%.1e", worst));
}

// 8
Outcome placement_locality() {
  const ArrayDescriptor aligned{100, 1};
  const double block = locality_cost(place_pages(aligned, BlockDist{}, 4), aligned,
                                     schedule_access_trace(100, Static{}, 4))
                           .locality_fraction();
  const ArrayDescriptor big{10000, 1};
  const double cyclic = locality_cost(place_pages(big, CyclicDist{}, 4), big,
                                      schedule_access_trace(10000, Static{}, 4))
                            .locality_fraction();
  const std::string detail = "block " + fmt("%.4f", block) + ", cyclic " + fmt("%.4f", cyclic);
  if (block != 1.0 || std::abs(cyclic - 0.25) > 0.02) return fail(detail);
  return pass(detail);
}

// The sweep shared by criteria 9 and 10, run through the installed CLI binary.
constexpr const char* kSweepArgs =
    "sweep --kernel run-avg --n 32768 --schedules static,dynamic:16,guided:16 --workers 4 --trials 5 --seed 1";

struct SweepRun {
  int exit_code = -1;
  std::optional<bench::ResultTable> table;
  std::string error;
};

SweepRun run_cli_sweep(const std::filesystem::path& csv) {
  SweepRun run;
  const std::string command =
      std::string("\"") + FORKBENCH_CLI_PATH + "\" " + kSweepArgs + " -o \"" + csv.string() + "\"";
  const int status = std::system(command.c_str());
  run.exit_code = status == -1 ? -1 : WEXITSTATUS(status);
  try {
    run.table = bench::read_csv_file(csv.string());
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  return run;
}

std::optional<SweepRun> first_sweep;
std::optional<SweepRun> second_sweep;
double sweep_seconds = 0.0;

void ensure_sweeps() {
  if (first_sweep) return;
  const auto dir = std::filesystem::temp_directory_path();
  const auto t0 = Clock::now();
  first_sweep = run_cli_sweep(dir / "forkbench_acceptance_a.csv");
  second_sweep = run_cli_sweep(dir / "forkbench_acceptance_b.csv");
  sweep_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
}

// 9
Outcome running_average_scheduling() {
  const std::vector<double> ramp{0, 1, 2, 3};
  for (const auto& policy : reduce_policies()) {
    ExecContext ctx(team_config(4), std::nullopt);
    if (running_average(ramp, policy, ctx) != std::vector<double>{0, 0.5, 1, 1.5}) {
      return fail("A[i]=i, n=4 wrong under " + to_string(policy));
    }
  }
  const unsigned cores = std::thread::hardware_concurrency();
  if (cores < 4) {
    return {Status::Skip, "n=4 exact under all policies; timing comparison needs >= 4 cores, found " +
                              std::to_string(cores)};
  }
  ensure_sweeps();
  if (!first_sweep->table) return fail("sweep CSV unreadable: " + first_sweep->error);
  std::map<std::string, std::vector<Duration>> times;
  for (const auto& r : first_sweep->table->rows) times[r.policy].push_back(Duration{static_cast<double>(r.wall_time_ns)});
  const double stat = median(times["static"]).count();
  const double dyn = median(times["dynamic"]).count();
  const double gui = median(times["guided"]).count();
  const std::string detail = "medians (ms) static " + fmt("%.1f", stat / 1e6) + ", dynamic:16 " +
                             fmt("%.1f", dyn / 1e6) + ", guided:16 " + fmt("%.1f", gui / 1e6);
  if (std::min(dyn, gui) <= 1.1 * stat) return pass(detail);
  return fail(detail);
}

// 10
Outcome end_to_end_cli() {
  ensure_sweeps();
  for (const auto* run : {&*first_sweep, &*second_sweep}) {
    if (run->exit_code != 0) return fail("exit code " + std::to_string(run->exit_code));
    if (!run->table) return fail("CSV did not parse: " + run->error);
    if (run->table->rows.size() != 15) return fail("expected 15 rows, got " + std::to_string(run->table->rows.size()));
    if (!run->table->all_verified()) return fail("unverified rows");
  }
  const auto& a = first_sweep->table->rows;
  const auto& b = second_sweep->table->rows;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].checksum != b[i].checksum) return fail("checksum differs on row " + std::to_string(i));
  }
  const std::string detail = "15 rows verified, exit 0, checksums reproduced; both sweeps " +
                             fmt("%.1f", sweep_seconds) + " s";
  if (sweep_seconds > 60.0) return fail(detail + " (budget 60 s)");
  return pass(detail);
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "schedule coverage", 5.0, schedule_coverage},
      {2, "guided sequence", 0.001, guided_sequence},
      {3, "reduction oracle", 1.0, reduction_oracle},
      {4, "pi accuracy and order", 1.0, pi_order},
      {5, "game-of-life equivalence", 30.0, life_equivalence},
      {6, "message-passing semantics", 10.0, message_semantics},
      {7, "amdahl round trip", 0.001, amdahl_round_trip},
      {8, "placement locality", 1.0, placement_locality},
      {9, "running average scheduling", 0.0, running_average_scheduling},
      {10, "end-to-end CLI", 0.0, end_to_end_cli},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = fail(std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    if (outcome.status == Status::Pass && c.budget_s > 0.0 && elapsed > c.budget_s) {
      outcome = fail(outcome.detail + "; took " + fmt("%.3f", elapsed) + " s, budget " + fmt("%g", c.budget_s) + " s");
    }
    const char* label = outcome.status == Status::Pass ? "PASS" : outcome.status == Status::Fail ? "FAIL" : "SKIP";
    failures += outcome.status == Status::Fail;
    std::printf("%s criterion %2d  %-28s %8.3f s  %s\n", label, c.id, c.name, elapsed, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
