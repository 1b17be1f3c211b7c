#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "forkbench/chunk_source.hpp"
#include "forkbench/schedule.hpp"

namespace forkbench {

/// A (flattened) array distributed along one dimension.
struct ArrayDescriptor {
  std::size_t extent = 0;
  std::size_t elements_per_page = 1;

  std::size_t pages() const noexcept {
    return (extent + elements_per_page - 1) / elements_per_page;
  }
  std::size_t page_of(std::size_t element) const noexcept { return element / elements_per_page; }
};

/// One array element touched by one memory node (= worker).
struct Access {
  std::size_t element = 0;
  std::size_t node = 0;
  friend bool operator==(const Access&, const Access&) = default;
};

using AccessTrace = std::vector<Access>;

struct BlockDist {};
struct CyclicDist {};
// Each page lives on the node that touches it first in `touch_trace`;
// untouched pages default to node 0.
struct FirstTouchDist {
  AccessTrace touch_trace;
};

using Distribution = std::variant<BlockDist, CyclicDist, FirstTouchDist>;

std::string_view distribution_name(const Distribution& dist) noexcept;

struct PageMap {
  std::size_t nodes = 1;
  std::vector<std::size_t> node_of_page;
};

struct LocalityReport {
  std::size_t local_accesses = 0;
  std::size_t remote_accesses = 0;

  std::size_t total() const noexcept { return local_accesses + remote_accesses; }
  /// local / total, or 1.0 for an empty trace.
  double locality_fraction() const noexcept {
    const std::size_t n = total();
    return n == 0 ? 1.0 : static_cast<double>(local_accesses) / static_cast<double>(n);
  }
  friend bool operator==(const LocalityReport&, const LocalityReport&) = default;
};

/// Block: page k -> k / ceil(pages / nodes). Cyclic: k mod nodes.
PageMap place_pages(const ArrayDescriptor& desc, const Distribution& dist, std::size_t nodes);

/// Trace of a statically scheduled loop: one access per iteration, in
/// worker-major plan order, node = executing worker. Dynamic and guided
/// schedules are not reproducible and need a recorded claim log instead.
AccessTrace schedule_access_trace(std::size_t extent, const SchedulePolicy& policy,
                                  std::size_t workers);
AccessTrace schedule_access_trace(const std::vector<Claim>& claim_log);

LocalityReport locality_cost(const PageMap& map, const ArrayDescriptor& desc, const AccessTrace& trace);

/// CSV `element,node`, one access per line. A leading `element,node`
/// header line is accepted on read and written on write.
AccessTrace read_trace_csv(std::istream& in);
AccessTrace read_trace_csv_file(const std::string& path);
void write_trace_csv(std::ostream& out, const AccessTrace& trace);

}  // namespace forkbench
