#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "forkbench/bench.hpp"
#include "forkbench/chunk_source.hpp"
#include "forkbench/checksum.hpp"
#include "forkbench/error.hpp"
#include "forkbench/kernels.hpp"
#include "forkbench/life.hpp"
#include "forkbench/metrics.hpp"
#include "forkbench/placement.hpp"

namespace py = pybind11;
namespace fb = forkbench;

namespace {

using Range = std::tuple<std::size_t, std::size_t>;

fb::ExecModel make_model(const std::string& model, const std::string& policy,
                         std::optional<std::size_t> chunk) {
  switch (fb::bench::parse_model(model)) {
    case fb::bench::ModelTag::Serial:
      return fb::Serial{};
    case fb::bench::ModelTag::WorkShare:
      return fb::WorkShare{fb::make_policy(policy, chunk)};
    case fb::bench::ModelTag::MessagePass:
      return fb::MessagePass{};
  }
  return fb::Serial{};
}

fb::Distribution make_distribution(const std::string& name, const fb::AccessTrace& touch) {
  if (name == "block") return fb::BlockDist{};
  if (name == "cyclic") return fb::CyclicDist{};
  if (name == "first-touch") return fb::FirstTouchDist{touch};
  throw fb::ParseError("unknown distribution '" + name + "'");
}

fb::AccessTrace to_trace(const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  fb::AccessTrace trace;
  trace.reserve(pairs.size());
  for (const auto& [element, node] : pairs) trace.push_back({element, node});
  return trace;
}

std::vector<std::pair<std::size_t, std::size_t>> from_trace(const fb::AccessTrace& trace) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(trace.size());
  for (const auto& a : trace) out.emplace_back(a.element, a.node);
  return out;
}

}  // namespace

PYBIND11_MODULE(_forkbench, m) {
  m.doc() = "Fork-join scheduling, message passing and course kernels";

  // Derived types are registered last so their translators are tried first.
  auto& error = py::register_exception<fb::Error>(m, "ForkbenchError", PyExc_RuntimeError);
  py::register_exception<fb::TimeoutError>(m, "TimeoutError", error.ptr());
  py::register_exception<fb::ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<fb::ParseError>(m, "ParseError", PyExc_ValueError);

  // Scheduling
  m.def("resolve_schedule",
        [](std::optional<std::string> value) { return fb::to_string(fb::resolve_schedule_from_env(value)); },
        py::arg("value") = py::none(), "Parse `policy[,chunk]`; returns the canonical form.");
  m.def(
      "plan_static",
      [](std::size_t extent, std::size_t workers, std::optional<std::size_t> chunk) {
        std::vector<std::vector<Range>> out;
        for (const auto& ranges : fb::plan_static(extent, workers, chunk)) {
          auto& row = out.emplace_back();
          for (const auto& r : ranges) row.emplace_back(r.start, r.end);
        }
        return out;
      },
      py::arg("extent"), py::arg("workers"), py::arg("chunk") = py::none());
  m.def(
      "claim_sequence",
      [](const std::string& policy, std::optional<std::size_t> chunk, std::size_t extent,
         std::size_t workers) {
        fb::ChunkSource source(fb::make_policy(policy, chunk), extent, workers);
        std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> out;
        for (std::size_t w = 0; w < workers; ++w) {
          const std::size_t claimer = std::holds_alternative<fb::Static>(source.policy()) ? w : 0;
          while (auto r = source.claim(claimer)) out.emplace_back(claimer, r->start, r->end);
          if (claimer == 0 && !std::holds_alternative<fb::Static>(source.policy())) break;
        }
        return out;
      },
      py::arg("policy"), py::arg("chunk"), py::arg("extent"), py::arg("workers"),
      "Exhaust a chunk source from one claimer (per worker for static); returns (worker, start, end).");

  // Kernels
  m.def(
      "vector_sum",
      [](const std::vector<double>& values, const std::string& model, const std::string& policy,
         std::optional<std::size_t> chunk, std::size_t parallelism) {
        py::gil_scoped_release release;
        return fb::vector_sum(values, make_model(model, policy, chunk), parallelism);
      },
      py::arg("values"), py::arg("model") = "serial", py::arg("policy") = "static",
      py::arg("chunk") = py::none(), py::arg("parallelism") = 1);
  m.def(
      "pi_rectangle",
      [](std::size_t n, const std::string& model, const std::string& policy,
         std::optional<std::size_t> chunk, std::size_t parallelism) {
        py::gil_scoped_release release;
        return fb::pi_rectangle(n, make_model(model, policy, chunk), parallelism);
      },
      py::arg("n"), py::arg("model") = "serial", py::arg("policy") = "static",
      py::arg("chunk") = py::none(), py::arg("parallelism") = 1);
  m.def(
      "pi_simpson",
      [](std::size_t n, const std::string& model, const std::string& policy,
         std::optional<std::size_t> chunk, std::size_t parallelism) {
        py::gil_scoped_release release;
        return fb::pi_simpson(n, make_model(model, policy, chunk), parallelism);
      },
      py::arg("n"), py::arg("model") = "serial", py::arg("policy") = "static",
      py::arg("chunk") = py::none(), py::arg("parallelism") = 1);
  m.def(
      "running_average",
      [](const std::vector<double>& values, const std::string& policy, std::optional<std::size_t> chunk,
         std::size_t parallelism) {
        py::gil_scoped_release release;
        return fb::running_average(values, fb::make_policy(policy, chunk), parallelism);
      },
      py::arg("values"), py::arg("policy") = "static", py::arg("chunk") = py::none(),
      py::arg("parallelism") = 1);
  m.def(
      "prefix_sum",
      [](const std::vector<std::int64_t>& values, const std::string& model, const std::string& policy,
         std::optional<std::size_t> chunk, std::size_t parallelism) {
        py::gil_scoped_release release;
        return fb::prefix_sum(values, make_model(model, policy, chunk), parallelism);
      },
      py::arg("values"), py::arg("model") = "serial", py::arg("policy") = "static",
      py::arg("chunk") = py::none(), py::arg("parallelism") = 1);
  m.def(
      "prime_count",
      [](std::uint64_t n, const std::string& model, const std::string& policy,
         std::optional<std::size_t> chunk, std::size_t parallelism) {
        py::gil_scoped_release release;
        return fb::prime_count(n, make_model(model, policy, chunk), parallelism);
      },
      py::arg("n"), py::arg("model") = "serial", py::arg("policy") = "static",
      py::arg("chunk") = py::none(), py::arg("parallelism") = 1);
  m.def(
      "life_step", [](const std::string& grid) { return fb::life_step_serial(fb::Grid::parse(grid)).to_text(); },
      py::arg("grid"), "One generation of a grid in the text fixture format.");
  m.def(
      "life_run",
      [](const std::string& grid, std::size_t steps, const std::string& decomp, const std::string& model,
         const std::string& policy, std::optional<std::size_t> chunk, std::size_t parallelism) {
        const fb::Grid parsed = fb::Grid::parse(grid);
        const fb::Decomposition d = fb::parse_decomposition(decomp);
        const fb::ExecModel em = make_model(model, policy, chunk);
        py::gil_scoped_release release;
        return fb::life_run(parsed, steps, d, em, parallelism).to_text();
      },
      py::arg("grid"), py::arg("steps"), py::arg("decomp") = "row", py::arg("model") = "serial",
      py::arg("policy") = "static", py::arg("chunk") = py::none(), py::arg("parallelism") = 1);
  m.def(
      "random_grid",
      [](std::size_t width, std::size_t height, const std::string& boundary, std::uint64_t seed) {
        return fb::Grid::random(width, height, fb::parse_boundary(boundary), seed).to_text();
      },
      py::arg("width"), py::arg("height"), py::arg("boundary") = "dead", py::arg("seed") = 1);

  // Metrics
  m.def("speedup", py::overload_cast<double, double>(&fb::speedup), py::arg("t1"), py::arg("tp"));
  m.def("efficiency", &fb::efficiency, py::arg("speedup"), py::arg("workers"));
  m.def(
      "amdahl_fraction",
      [](const std::vector<std::pair<std::size_t, double>>& points) {
        std::vector<fb::Measurement> ms;
        for (const auto& [p, t] : points) ms.push_back({p, fb::Duration(t), 0, 0});
        return fb::amdahl_fraction(ms);
      },
      py::arg("points"), "Serial fraction from (workers, time_ns) pairs; needs a p=1 entry.");

  // Placement
  m.def(
      "schedule_access_trace",
      [](std::size_t extent, const std::string& policy, std::optional<std::size_t> chunk, std::size_t workers) {
        return from_trace(fb::schedule_access_trace(extent, fb::make_policy(policy, chunk), workers));
      },
      py::arg("extent"), py::arg("policy") = "static", py::arg("chunk") = py::none(), py::arg("workers") = 1);
  m.def(
      "place_pages",
      [](std::size_t extent, std::size_t elements_per_page, const std::string& distribution,
         std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& touch_trace) {
        const fb::ArrayDescriptor desc{extent, elements_per_page};
        return fb::place_pages(desc, make_distribution(distribution, to_trace(touch_trace)), nodes).node_of_page;
      },
      py::arg("extent"), py::arg("elements_per_page"), py::arg("distribution"), py::arg("nodes"),
      py::arg("touch_trace") = std::vector<std::pair<std::size_t, std::size_t>>{});
  m.def(
      "locality",
      [](std::size_t extent, std::size_t elements_per_page, const std::string& distribution,
         std::size_t nodes, const std::vector<std::pair<std::size_t, std::size_t>>& trace) {
        const fb::ArrayDescriptor desc{extent, elements_per_page};
        const auto accesses = to_trace(trace);
        const auto map = fb::place_pages(desc, make_distribution(distribution, accesses), nodes);
        const auto report = fb::locality_cost(map, desc, accesses);
        return std::make_tuple(report.local_accesses, report.remote_accesses, report.locality_fraction());
      },
      py::arg("extent"), py::arg("elements_per_page"), py::arg("distribution"), py::arg("nodes"),
      py::arg("trace"), "(local, remote, fraction) of `trace` under the distribution; first-touch uses the trace itself.");

  m.def(
      "checksum_reals", [](const std::vector<double>& values) { return fb::checksum_reals(values); },
      py::arg("values"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = fb::bench::main_with_args(args, out, err);
        }
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the forkbench CLI in-process; returns (exit_code, stdout, stderr).");
}
