#pragma once

// Parsing of IMU data-logger files and behavior-label files into validated,
// unit-normalized time series, plus session assembly around collar-recharge
// gaps.

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "actocat/csv.hpp"
#include "actocat/error.hpp"
#include "actocat/time.hpp"
#include "actocat/types.hpp"

namespace actocat {

enum class AccelUnits { milli_g, m_per_s2 };

constexpr double milli_g_to_ms2(double v) { return v * kGravity / 1000.0; }
constexpr double ms2_to_milli_g(double v) { return v * 1000.0 / kGravity; }

struct ImuParseResult {
  SampleSeries series;
  std::size_t skipped_rows = 0;
};

struct ImuParseOptions {
  AccelUnits units = AccelUnits::milli_g;
  int tz_offset_min = 0;    // offset of naked (non-Z) timestamps from UTC
  char delimiter = ',';
  std::string cat_id;
  int reorder_window = 2;   // tolerated clock-jitter displacement, in samples
};

namespace detail {

inline bool in_sensor_range(double v) {
  return std::fabs(v) <= kSensorRangeG * kGravity * (1.0 + kSensorRangeSlack);
}

}  // namespace detail

// Reads delimited text with a header naming either a combined timestamp
// column or separate date/time columns, plus aX/aY/aZ. Acceleration is
// converted to m/s^2 at parse time. Malformed rows are skipped and counted.
inline ImuParseResult parse_imu_log(std::istream& in,
                                    const ImuParseOptions& opt = {}) {
  CsvReader reader(in, opt.delimiter);
  const auto& header = reader.header();
  if (header.empty()) throw SchemaError("imu log: missing header row");

  const int col_t = find_column(header, {"tiso", "timestamp", "datetime", "t"});
  const int col_date = find_column(header, {"rtcdate", "date"});
  const int col_time = find_column(header, {"rtctime", "time"});
  const int col_ax = find_column(header, {"ax", "accx", "accelx"});
  const int col_ay = find_column(header, {"ay", "accy", "accely"});
  const int col_az = find_column(header, {"az", "accz", "accelz"});
  const int col_temp = find_column(header, {"imudegc", "temp", "temperature"});

  if (col_ax < 0 || col_ay < 0 || col_az < 0)
    throw SchemaError("imu log: missing aX/aY/aZ columns");
  if (col_t < 0 && (col_date < 0 || col_time < 0))
    throw SchemaError("imu log: missing date/time columns");

  const std::int64_t tz_ms = static_cast<std::int64_t>(opt.tz_offset_min) *
                             kMsPerMinute;
  ImuParseResult result;
  result.series.cat_id = opt.cat_id;
  result.series.tz_offset_min = opt.tz_offset_min;
  auto& samples = result.series.samples;

  std::vector<std::string> fields;
  const int needed = std::max({col_t, col_date, col_time, col_ax, col_ay,
                               col_az});
  while (reader.next(fields)) {
    if (static_cast<int>(fields.size()) <= needed) {
      ++result.skipped_rows;
      continue;
    }
    std::int64_t t = 0;
    if (col_t >= 0) {
      const auto ts = parse_timestamp(fields[col_t]);
      if (!ts) {
        ++result.skipped_rows;
        continue;
      }
      t = ts->t_ms - (ts->explicit_utc ? 0 : tz_ms);
    } else {
      const auto date = parse_date(fields[col_date]);
      const auto tod = parse_time_of_day(fields[col_time]);
      if (!date || !tod) {
        ++result.skipped_rows;
        continue;
      }
      t = days_from_civil(*date) * kMsPerDay + *tod - tz_ms;
    }

    const auto vx = parse_double(fields[col_ax]);
    const auto vy = parse_double(fields[col_ay]);
    const auto vz = parse_double(fields[col_az]);
    if (!vx || !vy || !vz) {
      ++result.skipped_rows;
      continue;
    }
    ImuSample s;
    s.t_ms = t;
    if (opt.units == AccelUnits::milli_g) {
      s.ax = milli_g_to_ms2(*vx);
      s.ay = milli_g_to_ms2(*vy);
      s.az = milli_g_to_ms2(*vz);
    } else {
      s.ax = *vx;
      s.ay = *vy;
      s.az = *vz;
    }
    if (!std::isfinite(s.ax) || !std::isfinite(s.ay) || !std::isfinite(s.az) ||
        !detail::in_sensor_range(s.ax) || !detail::in_sensor_range(s.ay) ||
        !detail::in_sensor_range(s.az)) {
      ++result.skipped_rows;
      continue;
    }
    if (col_temp >= 0 && static_cast<int>(fields.size()) > col_temp) {
      if (const auto tv = parse_double(fields[col_temp])) s.temp_c = *tv;
    }

    // Tolerate small clock jitter: a sample may land up to reorder_window
    // positions back. Anything worse is a hard ordering error.
    if (!samples.empty() && s.t_ms <= samples.back().t_ms) {
      const std::size_t lo =
          samples.size() > static_cast<std::size_t>(opt.reorder_window)
              ? samples.size() - opt.reorder_window
              : 0;
      if (lo > 0 && s.t_ms < samples[lo - 1].t_ms)
        throw OrderingError("imu log: timestamps out of order beyond reorder "
                            "window at " + format_utc(s.t_ms));
      std::size_t pos = samples.size();
      while (pos > lo && samples[pos - 1].t_ms > s.t_ms) --pos;
      if (pos > 0 && samples[pos - 1].t_ms == s.t_ms) {
        ++result.skipped_rows;  // duplicate timestamp
        continue;
      }
      if (pos < samples.size() && samples[pos].t_ms == s.t_ms) {
        ++result.skipped_rows;
        continue;
      }
      samples.insert(samples.begin() + static_cast<std::ptrdiff_t>(pos), s);
    } else {
      samples.push_back(s);
    }
  }
  if (samples.empty())
    throw ParseError("imu log: zero parseable rows");
  return result;
}

// Canonical sample CSV: t_iso,ax,ay,az in m/s^2, 6 decimal places.
inline void write_canonical_csv(std::ostream& out, const SampleSeries& s) {
  out << "t_iso,ax,ay,az\n";
  char buf[96];
  for (const auto& smp : s.samples) {
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f\n", smp.ax, smp.ay,
                  smp.az);
    out << format_utc(smp.t_ms) << buf;
  }
}

// behavior -> active? map. Default taxonomy used throughout the project:
// resting and sleeping are inactivity, everything locomotor is activity.
using Taxonomy = std::map<std::string, bool>;

inline Taxonomy default_taxonomy() {
  return {{"resting", false},  {"sleeping", false}, {"walking", true},
          {"grooming", true},  {"eating", true},    {"drinking", true},
          {"jumping", true}};
}

// Shared by parse_label_log and tests that build events directly.
inline LabelTrack rasterize_labels(const std::vector<LabelEvent>& events,
                                   const Taxonomy& taxonomy) {
  LabelTrack track;
  if (events.empty()) return track;

  std::int64_t lo = events.front().start_ms, hi = events.front().end_ms;
  for (const auto& ev : events) {
    if (!taxonomy.count(ev.behavior))
      throw TaxonomyError("labels: unknown behavior '" + ev.behavior + "'");
    lo = std::min(lo, ev.start_ms);
    hi = std::max(hi, ev.end_ms);
  }
  const std::int64_t start_s = floor_div(lo, kMsPerSecond);
  const std::int64_t end_s = floor_div(hi + kMsPerSecond - 1, kMsPerSecond);
  track.start_ms = start_s * kMsPerSecond;
  const std::size_t n = static_cast<std::size_t>(end_s - start_s);
  std::vector<signed char> state(n, -1);  // -1 unset, 0 inactive, 1 active

  for (const auto& ev : events) {
    const bool act = taxonomy.at(ev.behavior);
    // A second belongs to the event covering its start instant.
    const std::int64_t s0 =
        floor_div(ev.start_ms + kMsPerSecond - 1, kMsPerSecond);
    for (std::int64_t s = s0; s * kMsPerSecond < ev.end_ms; ++s) {
      auto& cell = state[static_cast<std::size_t>(s - start_s)];
      if (cell >= 0 && cell != static_cast<signed char>(act))
        throw ConflictError(
            "labels: contradictory overlap at " +
            format_utc(s * kMsPerSecond) + " .. " +
            format_utc((s + 1) * kMsPerSecond));
      cell = act ? 1 : 0;
    }
  }
  track.active.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (state[i] < 0)
      throw CoverageError("labels: uncovered second at " +
                          format_utc(track.start_ms +
                                     static_cast<std::int64_t>(i) *
                                         kMsPerSecond));
    track.active[i] = static_cast<std::uint8_t>(state[i]);
  }
  return track;
}

// Reads label events (behavior,start,end ISO-8601) and rasterizes them into a
// 1 Hz binary track. Events must tile their span without contradictions.
inline LabelTrack parse_label_log(std::istream& in, const Taxonomy& taxonomy,
                                  char delimiter = ',') {
  CsvReader reader(in, delimiter);
  const auto& header = reader.header();
  if (header.empty()) throw SchemaError("label log: missing header row");
  const int col_b = find_column(header, {"behavior", "label"});
  const int col_s = find_column(header, {"start", "startms", "begin"});
  const int col_e = find_column(header, {"end", "endms", "stop"});
  if (col_b < 0 || col_s < 0 || col_e < 0)
    throw SchemaError("label log: need behavior,start,end columns");

  std::vector<LabelEvent> events;
  std::vector<std::string> fields;
  const int needed = std::max({col_b, col_s, col_e});
  while (reader.next(fields)) {
    if (static_cast<int>(fields.size()) <= needed)
      throw ParseError("label log: short row");
    const auto ts0 = parse_timestamp(fields[col_s]);
    const auto ts1 = parse_timestamp(fields[col_e]);
    if (!ts0 || !ts1)
      throw ParseError("label log: bad timestamp in row");
    LabelEvent ev;
    ev.behavior = fields[col_b];
    ev.start_ms = ts0->t_ms;
    ev.end_ms = ts1->t_ms;
    if (ev.end_ms < ev.start_ms)
      throw ParseError("label log: event ends before it starts");
    if (!taxonomy.count(ev.behavior))
      throw TaxonomyError("label log: unknown behavior '" + ev.behavior + "'");
    events.push_back(std::move(ev));
  }
  return rasterize_labels(events, taxonomy);
}

// Partition a series into maximal runs whose inter-sample interval never
// exceeds gap_threshold_s. Concatenated sessions reproduce the input.
inline std::vector<Session> assemble_sessions(const SampleSeries& series,
                                              double gap_threshold_s = 15.0) {
  std::vector<Session> sessions;
  const auto& smp = series.samples;
  if (smp.empty()) return sessions;
  const auto gap_ms = static_cast<std::int64_t>(gap_threshold_s * 1000.0);

  Session cur;
  cur.first = 0;
  cur.start_ms = smp.front().t_ms;
  cur.gap_before_s = 0.0;
  for (std::size_t i = 1; i < smp.size(); ++i) {
    const std::int64_t dt = smp[i].t_ms - smp[i - 1].t_ms;
    if (dt > gap_ms) {
      cur.last = i - 1;
      cur.end_ms = smp[i - 1].t_ms;
      sessions.push_back(cur);
      cur.first = i;
      cur.start_ms = smp[i].t_ms;
      cur.gap_before_s = static_cast<double>(dt) / 1000.0;
    }
  }
  cur.last = smp.size() - 1;
  cur.end_ms = smp.back().t_ms;
  sessions.push_back(cur);
  return sessions;
}

}  // namespace actocat
