#include "forkbench/placement.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "forkbench/detail/overloaded.hpp"
#include "forkbench/error.hpp"

namespace forkbench {

using detail::Overloaded;

std::string_view distribution_name(const Distribution& dist) noexcept {
  return std::visit(Overloaded{
                        [](const BlockDist&) { return std::string_view("block"); },
                        [](const CyclicDist&) { return std::string_view("cyclic"); },
                        [](const FirstTouchDist&) { return std::string_view("first-touch"); },
                    },
                    dist);
}

PageMap place_pages(const ArrayDescriptor& desc, const Distribution& dist, std::size_t nodes) {
  if (nodes == 0) throw ContractError("place_pages: nodes must be >= 1");
  if (desc.elements_per_page == 0) throw ContractError("place_pages: elements_per_page must be >= 1");
  const std::size_t pages = desc.pages();
  PageMap map{nodes, std::vector<std::size_t>(pages, 0)};
  std::visit(Overloaded{
                 [&](const BlockDist&) {
                   const std::size_t per_node = (pages + nodes - 1) / nodes;
                   for (std::size_t k = 0; k < pages; ++k) map.node_of_page[k] = k / per_node;
                 },
                 [&](const CyclicDist&) {
                   for (std::size_t k = 0; k < pages; ++k) map.node_of_page[k] = k % nodes;
                 },
                 [&](const FirstTouchDist& ft) {
                   std::vector<bool> touched(pages, false);
                   for (const Access& a : ft.touch_trace) {
                     if (a.element >= desc.extent) {
                       throw ContractError("first-touch trace element " + std::to_string(a.element) +
                                           " outside extent " + std::to_string(desc.extent));
                     }
                     if (a.node >= nodes) {
                       throw ContractError("first-touch trace node " + std::to_string(a.node) +
                                           " outside " + std::to_string(nodes) + " nodes");
                     }
                     const std::size_t page = desc.page_of(a.element);
                     if (touched[page]) continue;
                     touched[page] = true;
                     map.node_of_page[page] = a.node;
                   }
                 },
             },
             dist);
  return map;
}

AccessTrace schedule_access_trace(std::size_t extent, const SchedulePolicy& policy,
                                  std::size_t workers) {
  const auto* s = std::get_if<Static>(&policy);
  if (s == nullptr) {
    throw ContractError("schedule_access_trace: " + std::string(policy_name(policy)) +
                        " schedules need a recorded claim log");
  }
  const StaticPlan plan = plan_static(extent, workers, s->chunk);
  AccessTrace trace;
  trace.reserve(extent);
  for (std::size_t w = 0; w < plan.size(); ++w) {
    for (const IterationRange& range : plan[w]) {
      for (std::size_t e = range.start; e < range.end; ++e) trace.push_back({e, w});
    }
  }
  return trace;
}

AccessTrace schedule_access_trace(const std::vector<Claim>& claim_log) {
  AccessTrace trace;
  for (const Claim& claim : claim_log) {
    for (std::size_t e = claim.range.start; e < claim.range.end; ++e) trace.push_back({e, claim.worker});
  }
  return trace;
}

LocalityReport locality_cost(const PageMap& map, const ArrayDescriptor& desc, const AccessTrace& trace) {
  if (map.node_of_page.size() != desc.pages()) {
    throw ContractError("locality_cost: page map does not match the array descriptor");
  }
  LocalityReport report;
  for (const Access& a : trace) {
    if (a.element >= desc.extent) {
      throw ContractError("locality_cost: element " + std::to_string(a.element) +
                          " outside extent " + std::to_string(desc.extent));
    }
    if (map.node_of_page[desc.page_of(a.element)] == a.node) {
      ++report.local_accesses;
    } else {
      ++report.remote_accesses;
    }
  }
  return report;
}

namespace {

std::size_t parse_field(std::string_view token, std::size_t line) {
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r')) {
    token.remove_suffix(1);
  }
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError("trace line " + std::to_string(line) + ": invalid number '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

AccessTrace read_trace_csv(std::istream& in) {
  AccessTrace trace;
  std::string line;
  std::size_t number = 0;
  bool first_record = true;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const bool header = first_record && line == "element,node";
    first_record = false;
    if (header) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError("trace line " + std::to_string(number) + ": expected `element,node`");
    }
    const std::string_view view(line);
    trace.push_back({parse_field(view.substr(0, comma), number), parse_field(view.substr(comma + 1), number)});
  }
  return trace;
}

AccessTrace read_trace_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file '" + path + "'");
  return read_trace_csv(in);
}

void write_trace_csv(std::ostream& out, const AccessTrace& trace) {
  out << "element,node\n";
  for (const Access& a : trace) out << a.element << ',' << a.node << '\n';
}

}  // namespace forkbench
