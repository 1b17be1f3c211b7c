#include "forkbench/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <tuple>

#include <CLI11.hpp>

#include "forkbench/checksum.hpp"
#include "forkbench/error.hpp"
#include "forkbench/metrics.hpp"
#include "forkbench/placement.hpp"
#include "forkbench/work_sharing.hpp"

namespace forkbench::bench {

namespace {

constexpr std::pair<KernelId, std::string_view> kKernelNames[] = {
    {KernelId::Sum, "sum"},           {KernelId::PiRect, "pi-rect"},
    {KernelId::PiSimpson, "pi-simpson"}, {KernelId::RunAvg, "run-avg"},
    {KernelId::Life, "life"},         {KernelId::PrefixSum, "prefix-sum"},
    {KernelId::Primes, "primes"},     {KernelId::Placement, "placement"},
};

constexpr std::pair<ModelTag, std::string_view> kModelNames[] = {
    {ModelTag::Serial, "serial"},
    {ModelTag::WorkShare, "work-share"},
    {ModelTag::MessagePass, "message-pass"},
};

std::optional<std::size_t> parse_chunk_token(const std::string& flag, const std::string& token) {
  if (token == "none" || token == "-" || token.empty()) return std::nullopt;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || value == 0) {
    throw ParseError(flag + ": invalid chunk '" + token + "' (positive integer or 'none')");
  }
  return value;
}

ScheduleChoice checked_choice(const std::string& flag, std::string policy,
                              std::optional<std::size_t> chunk) {
  try {
    make_policy(policy, chunk);
  } catch (const Error& e) {
    throw ParseError(flag + ": " + e.what());
  }
  std::transform(policy.begin(), policy.end(), policy.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return {policy, chunk};
}

}  // namespace

std::string_view to_string(KernelId kernel) noexcept {
  for (const auto& [id, name] : kKernelNames) {
    if (id == kernel) return name;
  }
  return "sum";
}

std::string_view to_string(ModelTag model) noexcept {
  for (const auto& [id, name] : kModelNames) {
    if (id == model) return name;
  }
  return "serial";
}

KernelId parse_kernel(std::string_view text) {
  for (const auto& [id, name] : kKernelNames) {
    if (name == text) return id;
  }
  throw ParseError("--kernel: unknown kernel '" + std::string(text) + "'");
}

ModelTag parse_model(std::string_view text) {
  for (const auto& [id, name] : kModelNames) {
    if (name == text) return id;
  }
  throw ParseError("--model: unknown model '" + std::string(text) + "'");
}

std::size_t default_size(KernelId kernel) noexcept {
  switch (kernel) {
    case KernelId::Sum:
      return 1'000'000;
    case KernelId::PiRect:
    case KernelId::PiSimpson:
      return 1'000'000;
    case KernelId::RunAvg:
      return std::size_t{1} << 15;
    case KernelId::Life:
      return 64;
    case KernelId::PrefixSum:
      return 100'000;
    case KernelId::Primes:
      return 100'000;
    case KernelId::Placement:
      return 10'000;
  }
  return 1000;
}

ExperimentSpec parse_args(const std::vector<std::string>& args) {
  CLI::App app{"forkbench: fork-join, scheduling and message-passing workbench", "forkbench"};
  app.require_subcommand(1, 1);

  ExperimentSpec spec;
  std::string kernel;
  std::string model = "work-share";
  std::string policy = "static";
  std::optional<std::size_t> chunk;
  std::vector<std::string> policies;
  std::vector<std::string> chunks;
  std::vector<std::string> schedules;
  std::string decomposition = "row";
  std::string boundary = "dead";
  std::optional<std::size_t> n;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--kernel", kernel, "sum|pi-rect|pi-simpson|run-avg|life|prefix-sum|primes|placement")
        ->required();
    sub->add_option("--model", model, "serial|work-share|message-pass");
    sub->add_option("--workers", spec.workers, "comma-separated worker counts")->delimiter(',');
    sub->add_option("--n", n, "problem size");
    sub->add_option("--trials", spec.trials, "timed trials per configuration");
    sub->add_option("--seed", spec.seed, "64-bit input seed");
    sub->add_option("--steps", spec.steps, "life: generations");
    sub->add_option("--grid", spec.grid_file, "life: grid fixture file");
    sub->add_option("--decomp", decomposition, "life: row|col|block2d[:RxC]");
    sub->add_option("--boundary", boundary, "life: dead|toroidal (random grids)");
    sub->add_option("--distribution", spec.distribution, "placement: block|cyclic|first-touch");
    sub->add_option("--granularity", spec.granularity, "placement: elements per page");
    sub->add_option("--trace", spec.trace_file, "placement: access trace CSV (element,node)");
    sub->add_option("--output,-o", spec.output, "CSV destination (default stdout)");
  };

  CLI::App* run = app.add_subcommand("run", "time one configuration across worker counts");
  add_common(run);
  run->add_option("--policy", policy, "static|dynamic|guided|runtime");
  run->add_option("--chunk", chunk, "chunk (static/dynamic) or minimum chunk (guided)");

  CLI::App* sweep = app.add_subcommand("sweep", "time the cartesian product of policies and chunks");
  add_common(sweep);
  sweep->add_option("--policies", policies, "comma-separated policies")->delimiter(',');
  sweep->add_option("--chunks", chunks, "comma-separated chunks ('none' for no chunk)")->delimiter(',');
  sweep->add_option("--schedules", schedules, "explicit list, e.g. static,dynamic:16,guided:16")
      ->delimiter(',');

  CLI::App* report = app.add_subcommand("report", "recompute the summary from an existing CSV");
  std::string input;
  report->add_option("--input,-i", input, "CSV produced by run or sweep")->required();

  std::vector<const char*> argv{"forkbench"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw ParseError(e.what());
  }

  if (report->parsed()) {
    spec.command = Command::Report;
    spec.input = input;
    return spec;
  }
  spec.command = run->parsed() ? Command::Run : Command::Sweep;
  spec.kernel = parse_kernel(kernel);
  spec.model = parse_model(model);
  spec.decomposition = parse_decomposition(decomposition);
  spec.boundary = parse_boundary(boundary);
  spec.n = n.value_or(default_size(spec.kernel));

  if (spec.workers.empty()) throw ParseError("--workers: needs at least one worker count");
  for (std::size_t w : spec.workers) {
    if (w == 0) throw ParseError("--workers: worker counts must be >= 1");
  }
  if (spec.trials == 0) throw ParseError("--trials: must be >= 1");
  if (spec.granularity == 0) throw ParseError("--granularity: must be >= 1");
  if (spec.distribution != "block" && spec.distribution != "cyclic" &&
      spec.distribution != "first-touch") {
    throw ParseError("--distribution: unknown distribution '" + spec.distribution + "'");
  }
  if (spec.kernel == KernelId::Life && !spec.steps) throw ParseError("--steps: required for the life kernel");
  if (spec.kernel == KernelId::RunAvg && spec.model == ModelTag::MessagePass) {
    throw ParseError("--model: run-avg supports serial and work-share only");
  }

  spec.schedules.clear();
  if (spec.command == Command::Run) {
    if (chunk && *chunk == 0) throw ParseError("--chunk: must be >= 1");
    spec.schedules.push_back(checked_choice("--policy", policy, chunk));
  } else if (!schedules.empty()) {
    for (const auto& token : schedules) {
      const auto colon = token.find(':');
      const std::string name = token.substr(0, colon);
      std::optional<std::size_t> c;
      if (colon != std::string::npos) c = parse_chunk_token("--schedules", token.substr(colon + 1));
      spec.schedules.push_back(checked_choice("--schedules", name, c));
    }
  } else {
    if (policies.empty()) policies = {"static"};
    if (chunks.empty()) chunks = {"none"};
    for (const auto& p : policies) {
      for (const auto& c : chunks) {
        spec.schedules.push_back(checked_choice("--policies", p, parse_chunk_token("--chunks", c)));
      }
    }
  }
  return spec;
}

bool ResultTable::all_verified() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.verified; });
}

namespace {

// A prepared kernel: inputs are generated once, `run` executes the timed
// region and returns the result checksum.
struct PreparedKernel {
  std::function<std::uint64_t(ExecContext&, const ExecModel&)> run;
  // Serial reference checksum, or nullopt when it depends on the run (see
  // placement with non-static schedules).
  std::function<std::optional<std::uint64_t>()> oracle;
};

Distribution make_distribution(const ExperimentSpec& spec, AccessTrace touch_trace) {
  if (spec.distribution == "block") return BlockDist{};
  if (spec.distribution == "cyclic") return CyclicDist{};
  return FirstTouchDist{std::move(touch_trace)};
}

std::uint64_t checksum_locality(const LocalityReport& report) {
  const std::int64_t counts[] = {static_cast<std::int64_t>(report.local_accesses),
                                 static_cast<std::int64_t>(report.remote_accesses)};
  return checksum_integers(counts);
}

// Trace of the loop actually executed by `ctx` under `policy`.
AccessTrace executed_trace(ExecContext& ctx, std::size_t extent, const SchedulePolicy& policy) {
  const SchedulePolicy resolved = resolve_policy(policy, ctx.team());
  if (std::holds_alternative<Static>(resolved)) {
    return schedule_access_trace(extent, resolved, ctx.parallelism());
  }
  ClaimLog log;
  parallel_for(ctx.team(), extent, resolved, [](std::size_t) {}, BarrierMode::Wait, &log);
  return schedule_access_trace(log.claims());
}

PreparedKernel prepare(const ExperimentSpec& spec) {
  const std::size_t n = spec.n;
  switch (spec.kernel) {
    case KernelId::Sum: {
      auto input = std::make_shared<std::vector<double>>(random_dyadic_reals(n, spec.seed));
      return {[input](ExecContext& ctx, const ExecModel& m) {
                return checksum_real(vector_sum(*input, m, ctx));
              },
              [input] {
                return std::optional<std::uint64_t>(checksum_real(vector_sum(*input, Serial{}, 1)));
              }};
    }
    case KernelId::PiRect:
      return {[n](ExecContext& ctx, const ExecModel& m) { return checksum_real(pi_rectangle(n, m, ctx)); },
              [n] { return std::optional<std::uint64_t>(checksum_real(pi_rectangle(n, Serial{}, 1))); }};
    case KernelId::PiSimpson:
      return {[n](ExecContext& ctx, const ExecModel& m) { return checksum_real(pi_simpson(n, m, ctx)); },
              [n] { return std::optional<std::uint64_t>(checksum_real(pi_simpson(n, Serial{}, 1))); }};
    case KernelId::RunAvg: {
      auto input = std::make_shared<std::vector<double>>(n);
      for (std::size_t i = 0; i < n; ++i) (*input)[i] = static_cast<double>(i);
      return {[input](ExecContext& ctx, const ExecModel& m) {
                if (const auto* ws = std::get_if<WorkShare>(&m)) {
                  return checksum_reals(running_average(*input, ws->policy, ctx));
                }
                return checksum_reals(running_average_serial(*input));
              },
              [input] { return std::optional<std::uint64_t>(checksum_reals(running_average_serial(*input))); }};
    }
    case KernelId::Life: {
      auto grid = std::make_shared<Grid>(
          spec.grid_file ? [&] {
            std::ifstream in(*spec.grid_file);
            if (!in) throw Error("cannot open grid file '" + *spec.grid_file + "'");
            std::stringstream text;
            text << in.rdbuf();
            return Grid::parse(text.str());
          }()
                         : Grid::random(n, n, spec.boundary, spec.seed));
      const std::size_t steps = spec.steps.value_or(0);
      const Decomposition decomp = spec.decomposition;
      return {[grid, steps, decomp](ExecContext& ctx, const ExecModel& m) {
                return checksum_bytes(life_run(*grid, steps, decomp, m, ctx).cells());
              },
              [grid, steps, decomp] {
                return std::optional<std::uint64_t>(
                    checksum_bytes(life_run(*grid, steps, decomp, Serial{}, 1).cells()));
              }};
    }
    case KernelId::PrefixSum: {
      auto input = std::make_shared<std::vector<std::int64_t>>(random_integers(n, spec.seed, -1000, 1000));
      return {[input](ExecContext& ctx, const ExecModel& m) { return checksum_integers(prefix_sum(*input, m, ctx)); },
              [input] {
                return std::optional<std::uint64_t>(checksum_integers(prefix_sum(*input, Serial{}, 1)));
              }};
    }
    case KernelId::Primes:
      return {[n](ExecContext& ctx, const ExecModel& m) {
                return checksum_integer(static_cast<std::int64_t>(prime_count(n, m, ctx)));
              },
              [n] {
                return std::optional<std::uint64_t>(
                    checksum_integer(static_cast<std::int64_t>(prime_count(n, Serial{}, 1))));
              }};
    case KernelId::Placement: {
      const ArrayDescriptor desc{n, spec.granularity};
      std::shared_ptr<const AccessTrace> fixed;
      if (spec.trace_file) fixed = std::make_shared<AccessTrace>(read_trace_csv_file(*spec.trace_file));
      auto spec_copy = std::make_shared<ExperimentSpec>(spec);
      // The oracle has to see the same trace as the timed region, so the
      // last scored trace is kept and rescored serially.
      auto last = std::make_shared<std::optional<std::uint64_t>>();
      return {[desc, fixed, spec_copy, last](ExecContext& ctx, const ExecModel& m) {
                const SchedulePolicy policy =
                    std::holds_alternative<WorkShare>(m) ? std::get<WorkShare>(m).policy : SchedulePolicy{Static{}};
                const AccessTrace trace = fixed ? *fixed : executed_trace(ctx, desc.extent, policy);
                const AccessTrace touch = fixed ? *fixed : executed_trace(ctx, desc.extent, policy);
                const Distribution dist = make_distribution(*spec_copy, touch);
                const PageMap map = place_pages(desc, dist, ctx.parallelism());
                const LocalityReport report = locality_cost(map, desc, trace);
                // Independent recount: owner page computed per access.
                std::size_t local = 0;
                for (const Access& a : trace) local += map.node_of_page.at(a.element / desc.elements_per_page) == a.node;
                *last = checksum_locality({local, trace.size() - local});
                return checksum_locality(report);
              },
              [last] { return *last; }};
    }
  }
  throw ContractError("unknown kernel");
}

ExecModel make_model(ModelTag tag, const SchedulePolicy& policy) {
  switch (tag) {
    case ModelTag::Serial:
      return Serial{};
    case ModelTag::WorkShare:
      return WorkShare{policy};
    case ModelTag::MessagePass:
      return MessagePass{};
  }
  return Serial{};
}

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec) {
  PreparedKernel kernel = prepare(spec);
  const bool per_run_oracle = spec.kernel == KernelId::Placement;
  const std::optional<std::uint64_t> oracle = per_run_oracle ? std::nullopt : kernel.oracle();

  std::vector<std::size_t> workers = spec.workers;
  std::sort(workers.begin(), workers.end());
  workers.erase(std::unique(workers.begin(), workers.end()), workers.end());

  ResultTable table;
  for (const ScheduleChoice& choice : spec.schedules) {
    const SchedulePolicy policy = make_policy(choice.policy, choice.chunk);
    const ExecModel model = make_model(spec.model, policy);
    for (std::size_t p : workers) {
      ExecContext ctx(p);
      for (std::size_t trial = 0; trial < spec.trials; ++trial) {
        const auto start = std::chrono::steady_clock::now();
        const std::uint64_t checksum = kernel.run(ctx, model);
        const auto stop = std::chrono::steady_clock::now();
        const auto reference = per_run_oracle ? kernel.oracle() : oracle;

        ResultRow row;
        row.kernel = std::string(to_string(spec.kernel));
        row.model = std::string(to_string(spec.model));
        row.policy = choice.policy;
        row.chunk = choice.chunk;
        row.workers = p;
        row.n = spec.n;
        row.trial = trial;
        row.wall_time_ns = static_cast<std::uint64_t>(
            std::max<std::int64_t>(1, std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count()));
        row.checksum = checksum;
        row.verified = reference && *reference == checksum;
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

void emit_csv(const ResultTable& table, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const ResultRow& r : table.rows) {
    out << r.kernel << ',' << r.model << ',' << r.policy << ',';
    if (r.chunk) out << *r.chunk;
    out << ',' << r.workers << ',' << r.n << ',' << r.trial << ',' << r.wall_time_ns << ','
        << format_checksum(r.checksum) << ',' << (r.verified ? "true" : "false") << '\n';
  }
  if (!table.rows.empty()) out << summarize(table);
}

void emit_csv(const ResultTable& table, const std::optional<std::string>& path) {
  if (!path) {
    emit_csv(table, std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(*path);
  if (!out) throw Error("cannot write CSV to '" + *path + "'");
  emit_csv(table, out);
  out.flush();
  if (!out) throw Error("error while writing CSV to '" + *path + "'");
}

namespace {

template <class T>
T parse_number(const std::string& token, const char* column, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("CSV line " + std::to_string(line) + ": invalid " + column + " '" + token + "'");
  }
  return value;
}

}  // namespace

ResultTable read_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  std::size_t number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw ParseError("CSV line " + std::to_string(number) + ": unexpected header");
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream stream(line);
    std::string field;
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 10) {
      throw ParseError("CSV line " + std::to_string(number) + ": expected 10 fields, got " +
                       std::to_string(fields.size()));
    }
    ResultRow row;
    row.kernel = fields[0];
    row.model = fields[1];
    row.policy = fields[2];
    if (!fields[3].empty()) row.chunk = parse_number<std::size_t>(fields[3], "chunk", number);
    row.workers = parse_number<std::size_t>(fields[4], "workers", number);
    row.n = parse_number<std::size_t>(fields[5], "n", number);
    row.trial = parse_number<std::size_t>(fields[6], "trial", number);
    row.wall_time_ns = parse_number<std::uint64_t>(fields[7], "wall_time_ns", number);
    row.checksum = parse_checksum(fields[8]);
    if (fields[9] != "true" && fields[9] != "false") {
      throw ParseError("CSV line " + std::to_string(number) + ": verified must be true|false");
    }
    row.verified = fields[9] == "true";
    table.rows.push_back(std::move(row));
  }
  if (!header_seen) throw ParseError("CSV: missing header");
  return table;
}

ResultTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open CSV '" + path + "'");
  return read_csv(in);
}

std::string summarize(const ResultTable& table) {
  using Key = std::tuple<std::string, std::string, std::string, std::optional<std::size_t>, std::size_t>;
  std::vector<Key> order;
  std::map<Key, std::vector<Measurement>> groups;
  for (const ResultRow& r : table.rows) {
    Key key{r.kernel, r.model, r.policy, r.chunk, r.n};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back({r.workers, Duration(static_cast<double>(r.wall_time_ns)), r.checksum, r.trial});
  }

  std::ostringstream out;
  out << std::fixed;
  for (const Key& key : order) {
    const auto& [kernel, model, policy, chunk, n] = key;
    out << "# summary kernel=" << kernel << " model=" << model << " policy=" << policy
        << " chunk=" << (chunk ? std::to_string(*chunk) : std::string("none")) << " n=" << n << '\n';
    const auto& measurements = groups.at(key);
    const bool has_baseline = std::any_of(measurements.begin(), measurements.end(),
                                          [](const Measurement& m) { return m.workers == 1; });
    if (!has_baseline) {
      out << "#   no p=1 baseline; speedup not computed\n";
      continue;
    }
    const PerfReport report = build_report(measurements);
    for (const PerfPoint& point : report.points) {
      out << "#   workers=" << point.workers << " median_ns=" << std::setprecision(0)
          << point.median_time.count() << " speedup=" << std::setprecision(4) << point.speedup
          << " efficiency=" << point.efficiency << (point.superlinear ? " superlinear" : "") << '\n';
    }
    out << "#   amdahl_fraction=" << std::setprecision(6) << report.amdahl_fraction
        << (report.superlinear ? " (clamped; super-linear points present)" : "") << '\n';
  }
  return out.str();
}

int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  try {
    spec = parse_args(args);
  } catch (const HelpRequested& help) {
    out << help.text;
    return 0;
  } catch (const ParseError& e) {
    err << "usage error: " << e.what() << "\nrun `forkbench --help` for usage\n";
    return 2;
  }

  try {
    if (spec.command == Command::Report) {
      const ResultTable table = read_csv_file(*spec.input);
      out << summarize(table);
      if (!table.all_verified()) {
        err << "input contains unverified rows\n";
        return 1;
      }
      return 0;
    }

    const ResultTable table = run_experiment(spec);
    if (spec.output) {
      emit_csv(table, spec.output);
    } else {
      emit_csv(table, out);
    }
    int status = 0;
    for (const ResultRow& r : table.rows) {
      if (r.verified) continue;
      err << "unverified: kernel=" << r.kernel << " model=" << r.model << " policy=" << r.policy
          << " chunk=" << (r.chunk ? std::to_string(*r.chunk) : "none") << " workers=" << r.workers
          << " trial=" << r.trial << " checksum=" << format_checksum(r.checksum) << '\n';
      status = 1;
    }
    return status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace forkbench::bench
