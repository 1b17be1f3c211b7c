#include "forkbench/metrics.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "forkbench/error.hpp"

namespace forkbench {

double speedup(double t1, double tp) {
  if (!(t1 > 0.0) || !(tp > 0.0)) throw ContractError("speedup: times must be positive");
  return t1 / tp;
}

double speedup(Duration t1, Duration tp) { return speedup(t1.count(), tp.count()); }

double efficiency(double s, std::size_t workers) {
  if (workers == 0) throw ContractError("efficiency: workers must be >= 1");
  return s / static_cast<double>(workers);
}

Duration median(std::vector<Duration> samples) {
  if (samples.empty()) throw ContractError("median of no samples");
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  if (samples.size() % 2 == 1) return samples[mid];
  return (samples[mid - 1] + samples[mid]) / 2.0;
}

double amdahl_point(double s, std::size_t workers) {
  if (workers < 2) throw ContractError("amdahl_point: needs p > 1");
  const double p = static_cast<double>(workers);
  return (p / s - 1.0) / (p - 1.0);
}

namespace {

std::map<std::size_t, Duration> medians_by_workers(std::span<const Measurement> measurements) {
  std::map<std::size_t, std::vector<Duration>> grouped;
  for (const auto& m : measurements) {
    if (m.workers == 0) throw ContractError("measurement with zero workers");
    if (!(m.wall_time.count() > 0.0)) throw ContractError("measurement with non-positive wall time");
    grouped[m.workers].push_back(m.wall_time);
  }
  std::map<std::size_t, Duration> out;
  for (auto& [p, samples] : grouped) out[p] = median(std::move(samples));
  return out;
}

}  // namespace

PerfReport build_report(std::span<const Measurement> measurements) {
  const auto medians = medians_by_workers(measurements);
  const auto base = medians.find(1);
  if (base == medians.end()) throw ContractError("performance report needs a p = 1 baseline");

  PerfReport report;
  report.baseline_time = base->second;
  double fraction_sum = 0.0;
  std::size_t fraction_count = 0;
  for (const auto& [p, time] : medians) {
    PerfPoint point;
    point.workers = p;
    point.median_time = time;
    point.speedup = speedup(report.baseline_time, time);
    point.efficiency = efficiency(point.speedup, p);
    if (p > 1) {
      point.serial_fraction = amdahl_point(point.speedup, p);
      point.superlinear = point.serial_fraction < 0.0;
      report.superlinear = report.superlinear || point.superlinear;
      fraction_sum += point.serial_fraction;
      ++fraction_count;
    }
    report.points.push_back(point);
  }
  if (fraction_count > 0) {
    report.amdahl_fraction = std::clamp(fraction_sum / static_cast<double>(fraction_count), 0.0, 1.0);
  }
  return report;
}

double amdahl_fraction(std::span<const Measurement> measurements) {
  const PerfReport report = build_report(measurements);
  if (report.points.size() < 2) throw ContractError("amdahl_fraction: needs at least one p > 1 measurement");
  return report.amdahl_fraction;
}

}  // namespace forkbench
