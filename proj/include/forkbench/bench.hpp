#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forkbench/kernels.hpp"
#include "forkbench/life.hpp"

namespace forkbench::bench {

enum class KernelId { Sum, PiRect, PiSimpson, RunAvg, Life, PrefixSum, Primes, Placement };
enum class ModelTag { Serial, WorkShare, MessagePass };
enum class Command { Run, Sweep, Report };

std::string_view to_string(KernelId kernel) noexcept;
std::string_view to_string(ModelTag model) noexcept;
KernelId parse_kernel(std::string_view text);
ModelTag parse_model(std::string_view text);

/// A schedule as named on the command line; `runtime` is resolved per run.
struct ScheduleChoice {
  std::string policy = "static";
  std::optional<std::size_t> chunk;
  friend bool operator==(const ScheduleChoice&, const ScheduleChoice&) = default;
};

struct ExperimentSpec {
  Command command = Command::Run;
  KernelId kernel = KernelId::Sum;
  ModelTag model = ModelTag::WorkShare;
  std::vector<ScheduleChoice> schedules{ScheduleChoice{}};
  std::vector<std::size_t> workers{1};
  std::size_t n = 0;
  std::size_t trials = 5;
  std::uint64_t seed = 1;
  std::optional<std::size_t> steps;
  std::optional<std::string> grid_file;
  Decomposition decomposition = RowBlock{};
  Boundary boundary = Boundary::Dead;
  std::string distribution = "block";
  std::size_t granularity = 1;
  std::optional<std::string> trace_file;
  std::optional<std::string> output;
  std::optional<std::string> input;  // report only
};

/// Default problem size for a kernel when --n is not given.
std::size_t default_size(KernelId kernel) noexcept;

/// Thrown by parse_args for --help; carries the usage text.
struct HelpRequested {
  std::string text;
};

/// `args` excludes the program name: {"run", "--kernel", "sum", ...}.
/// Throws ParseError naming the offending flag or value.
ExperimentSpec parse_args(const std::vector<std::string>& args);

struct ResultRow {
  std::string kernel;
  std::string model;
  std::string policy;
  std::optional<std::size_t> chunk;
  std::size_t workers = 1;
  std::size_t n = 0;
  std::size_t trial = 0;
  std::uint64_t wall_time_ns = 0;
  std::uint64_t checksum = 0;
  bool verified = false;
  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  friend bool operator==(const ResultTable&, const ResultTable&) = default;

  bool all_verified() const noexcept;
};

/// Runs every (schedule, workers ascending, trial) combination, timing only
/// the kernel call and checking each result against the serial oracle.
ResultTable run_experiment(const ExperimentSpec& spec);

inline constexpr std::string_view kCsvHeader =
    "kernel,model,policy,chunk,workers,n,trial,wall_time_ns,checksum,verified";

/// Header, one row per measurement, then `#`-prefixed summary lines.
void emit_csv(const ResultTable& table, std::ostream& out);
/// Writes to `path`, or standard output when absent. Throws Error if the
/// file cannot be written.
void emit_csv(const ResultTable& table, const std::optional<std::string>& path);

/// Inverse of emit_csv; comment lines are skipped.
ResultTable read_csv(std::istream& in);
ResultTable read_csv_file(const std::string& path);

/// Per configuration group: median time, speedup, efficiency per worker
/// count and the Amdahl serial fraction. Every line starts with `#`.
std::string summarize(const ResultTable& table);

/// Entry point shared by the CLI binary. Returns the process exit code.
int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace forkbench::bench
