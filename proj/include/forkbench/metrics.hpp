#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace forkbench {

using Duration = std::chrono::duration<double, std::nano>;

struct Measurement {
  std::size_t workers = 1;
  Duration wall_time{0};
  std::uint64_t result_checksum = 0;
  std::size_t trial = 0;
};

double speedup(Duration t1, Duration tp);
double speedup(double t1, double tp);
double efficiency(double speedup, std::size_t workers);

/// Median; the mean of the two middle values for an even count.
Duration median(std::vector<Duration> samples);

/// Serial fraction implied by a single point: (p / S - 1) / (p - 1).
double amdahl_point(double speedup, std::size_t workers);

/// Mean of the per-point serial fractions for every p > 1 (medians over
/// trials, against the p = 1 median), clamped to [0, 1].
double amdahl_fraction(std::span<const Measurement> measurements);

struct PerfPoint {
  std::size_t workers = 1;
  Duration median_time{0};
  double speedup = 1.0;
  double efficiency = 1.0;
  // Unclamped per-point estimate; meaningless at p = 1.
  double serial_fraction = 0.0;
  bool superlinear = false;
};

struct PerfReport {
  Duration baseline_time{0};
  std::vector<PerfPoint> points;  // ascending workers
  double amdahl_fraction = 0.0;   // 0 when only the baseline is present
  bool superlinear = false;       // any point had S > p
};

/// Needs a p = 1 baseline. Points are aggregated per worker count.
PerfReport build_report(std::span<const Measurement> measurements);

}  // namespace forkbench
