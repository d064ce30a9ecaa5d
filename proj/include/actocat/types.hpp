#pragma once

// Core domain types shared by the pipeline stages.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace actocat {

constexpr double kGravity = 9.80665;         // m/s^2
constexpr double kSensorRangeG = 2.0;        // accelerometer full scale
constexpr double kSensorRangeSlack = 0.05;   // tolerated overshoot

// One accelerometer reading, already converted to m/s^2, UTC timestamp.
struct ImuSample {
  std::int64_t t_ms = 0;
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;
  std::optional<double> temp_c;
};

struct SampleSeries {
  std::string cat_id;
  std::vector<ImuSample> samples;    // sorted by t_ms, no duplicates
  double nominal_period_s = 5.0;     // 0.2 Hz logger
  int tz_offset_min = 0;             // local-time analytics only
};

// Maximal run of samples with no gap larger than the session threshold.
// Indices refer into the owning SampleSeries.
struct Session {
  std::size_t first = 0;       // index of first sample
  std::size_t last = 0;        // index of last sample (inclusive)
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  double gap_before_s = 0.0;   // 0 for the first session

  std::size_t size() const { return last - first + 1; }
};

struct LabelEvent {
  std::string behavior;
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;  // half-open [start, end)
};

// Per-second binary activity expectations derived from behavior labels.
struct LabelTrack {
  std::int64_t start_ms = 0;          // aligned to a whole second
  std::vector<std::uint8_t> active;   // one entry per second
};

struct CatProfile {
  enum class Sex { female, male };
  std::string cat_id;
  Sex sex = Sex::female;
  double age_years = 0.0;
  std::string notes;
};

// Binary classification per epoch (one epoch per derivative point).
struct ActivityLevelSeries {
  std::string cat_id;
  std::vector<std::int64_t> t_ms;     // strictly increasing
  std::vector<std::uint8_t> level;    // 0 or 1
  double period_s = 5.0;              // nominal epoch spacing
};

// |dA/dt| in m/s^3, stamped at the later sample of each pair.
struct DerivativeSeries {
  std::vector<std::int64_t> t_ms;
  std::vector<double> da;
};

// Active-epoch count per non-overlapping 60 s window (0..12 at 5 s epochs).
struct IntensitySeries {
  std::vector<std::int64_t> window_start_ms;
  std::vector<int> count;
};

// Label-derived expectations downsampled to the epoch grid.
struct ExpectationSeries {
  std::vector<std::int64_t> t_ms;
  std::vector<std::uint8_t> expected;
};

}  // namespace actocat
