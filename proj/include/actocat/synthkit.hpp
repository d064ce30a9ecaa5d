#pragma once

// Synthetic IMU traces with known ground truth, and brute-force oracles that
// recompute the rhythm metrics from interval arithmetic on the schedule --
// an implementation path independent of the epoch pipeline.
//
// Rest epochs emit gravity along a fixed orientation plus Gaussian jitter.
// Active epochs add a bounded random walk on the magnitude with a guaranteed
// minimum step, so consecutive 5 s samples always differ by much more than
// any plausible threshold, and the walk returns to zero on the last active
// sample of each bout. A noise-free trace therefore classifies exactly like
// the schedule (bouts shorter than two samples excepted).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "actocat/ephemeris.hpp"
#include "actocat/error.hpp"
#include "actocat/rhythm.hpp"
#include "actocat/time.hpp"
#include "actocat/types.hpp"

namespace actocat {

using Interval = std::pair<std::int64_t, std::int64_t>;  // half-open [a, b)

// Activity pattern over a span: the listed intervals are active, everything
// else in the span is inactive.
struct ActivitySchedule {
  std::int64_t span_start_ms = 0;
  std::int64_t span_end_ms = 0;
  std::vector<Interval> active;  // sorted, disjoint, inside the span

  void validate() const {
    if (span_end_ms <= span_start_ms)
      throw ParamError("schedule: empty span");
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (active[i].second <= active[i].first)
        throw ParamError("schedule: empty or inverted interval");
      if (active[i].first < span_start_ms || active[i].second > span_end_ms)
        throw ParamError("schedule: interval outside span");
      if (i > 0 && active[i].first < active[i - 1].second)
        throw ParamError("schedule: overlapping intervals");
    }
  }

  bool active_at(std::int64_t t) const {
    auto it = std::upper_bound(
        active.begin(), active.end(), t,
        [](std::int64_t v, const Interval& iv) { return v < iv.first; });
    return it != active.begin() && t < std::prev(it)->second;
  }

  double active_fraction() const {
    std::int64_t a = 0;
    for (const auto& iv : active) a += iv.second - iv.first;
    return static_cast<double>(a) /
           static_cast<double>(span_end_ms - span_start_ms);
  }

  // Daily repeating local-time windows over n_days starting at the local
  // midnight of `first`.
  static ActivitySchedule from_daily_windows(
      const CivilDate& first, int n_days,
      std::span<const Interval> windows_local_ms, int tz_offset_min) {
    if (n_days < 1) throw ParamError("schedule: need at least one day");
    const std::int64_t tz = static_cast<std::int64_t>(tz_offset_min) *
                            kMsPerMinute;
    ActivitySchedule s;
    s.span_start_ms = days_from_civil(first) * kMsPerDay - tz;
    s.span_end_ms = s.span_start_ms + static_cast<std::int64_t>(n_days) *
                                          kMsPerDay;
    for (int d = 0; d < n_days; ++d) {
      const std::int64_t day0 = s.span_start_ms + static_cast<std::int64_t>(d) *
                                                      kMsPerDay;
      for (const auto& w : windows_local_ms)
        s.active.emplace_back(day0 + w.first, day0 + w.second);
    }
    std::sort(s.active.begin(), s.active.end());
    s.validate();
    return s;
  }
};

struct NoiseModel {
  double rest_jitter_sigma = 0.005;   // m/s^2, per axis
  double active_amp = 1.0;            // m/s^2, magnitude excursion bound
  double active_jitter_sigma = 0.05;  // m/s^2, spread of walk step lengths
  std::array<double, 3> orientation{0.0, 0.0, 1.0};  // unit vector
  std::uint64_t seed = 1;

  void validate() const {
    if (rest_jitter_sigma < 0.0 || active_jitter_sigma < 0.0)
      throw ParamError("noise: negative sigma");
    if (!(active_amp > 0.0)) throw ParamError("noise: active_amp must be > 0");
    const double n2 = orientation[0] * orientation[0] +
                      orientation[1] * orientation[1] +
                      orientation[2] * orientation[2];
    if (std::fabs(n2 - 1.0) > 1e-6)
      throw ParamError("noise: orientation must be a unit vector");
  }
};

struct SyntheticTrace {
  SampleSeries series;
  ExpectationSeries truth;  // schedule sampled on the grid
};

// Magnitude walk band and step bounds, as fractions of active_amp. The
// minimum step keeps every intra-bout |dA| well above any sane threshold;
// the band floor keeps bout entry/exit jumps detectable too.
namespace detail {
constexpr double kWalkFloor = 0.30;
constexpr double kWalkCeil = 1.00;
constexpr double kStepMin = 0.25;
constexpr double kStepMax = 0.35;
}  // namespace detail

inline SyntheticTrace generate_trace(const ActivitySchedule& schedule,
                                     const NoiseModel& noise,
                                     double sample_period_s = 5.0,
                                     std::span<const Interval> dropouts = {},
                                     std::string cat_id = {}) {
  schedule.validate();
  noise.validate();
  if (!(sample_period_s > 0.0))
    throw ParamError("generate_trace: bad sample period");
  const auto period_ms = static_cast<std::int64_t>(sample_period_s * 1000.0);

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  auto dropped = [&](std::int64_t t) {
    for (const auto& d : dropouts)
      if (t >= d.first && t < d.second) return true;
    return false;
  };

  SyntheticTrace out;
  out.series.cat_id = std::move(cat_id);
  out.series.nominal_period_s = sample_period_s;

  const double amp = noise.active_amp;
  double walk = 0.0;
  double walk_dir = 1.0;
  bool in_bout = false;

  for (std::int64_t t = schedule.span_start_ms; t < schedule.span_end_ms;
       t += period_ms) {
    const bool active = schedule.active_at(t);
    const bool last_of_bout = active && !schedule.active_at(t + period_ms);
    double p = 0.0;
    if (active && !last_of_bout) {
      if (!in_bout) {
        walk = amp * (detail::kWalkFloor +
                      uni(rng) * (detail::kWalkCeil - detail::kWalkFloor));
        walk_dir = uni(rng) < 0.5 ? -1.0 : 1.0;
        in_bout = true;
      } else {
        const double extra =
            std::min(std::fabs(jitter(rng)) * noise.active_jitter_sigma,
                     (detail::kStepMax - detail::kStepMin) * amp);
        const double step = detail::kStepMin * amp + extra;
        double next = walk + walk_dir * step;
        if (next > detail::kWalkCeil * amp || next
                < detail::kWalkFloor * amp) {
          walk_dir = -walk_dir;
          next = walk + walk_dir * step;
        }
        walk = std::clamp(next, detail::kWalkFloor * amp,
                          detail::kWalkCeil * amp);
      }
      p = walk;
    } else {
      // Rest, or the final sample of a bout: return to baseline so the
      // following rest epoch sees no jump.
      in_bout = false;
      p = 0.0;
    }

    if (!dropped(t)) {
      ImuSample s;
      s.t_ms = t;
      const double m = kGravity + p;
      s.ax = noise.orientation[0] * m +
             jitter(rng) * noise.rest_jitter_sigma;
      s.ay = noise.orientation[1] * m +
             jitter(rng) * noise.rest_jitter_sigma;
      s.az = noise.orientation[2] * m +
             jitter(rng) * noise.rest_jitter_sigma;
      out.series.samples.push_back(s);
      out.truth.t_ms.push_back(t);
      out.truth.expected.push_back(active ? 1 : 0);
    } else {
      // Burn the same draws so dropouts do not shift the rest of the trace.
      jitter(rng);
      jitter(rng);
      jitter(rng);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// schedule oracle
// ---------------------------------------------------------------------------

struct OracleMetrics {
  TimeBudget budget;
  DayNightSplit split;
  HourlyProfile hourly;
};

namespace detail {

// Number of epoch grid points within [lo, hi): points t = span.first + j * p
// with 1 <= j <= (span.second - span.first) / p. The span endpoints are the
// first/last sample times of a session, so the first grid point (a sample
// with no predecessor) carries no epoch.
inline std::int64_t epochs_in(const Interval& span, std::int64_t period_ms,
                              std::int64_t lo, std::int64_t hi) {
  const std::int64_t a = span.first;
  const std::int64_t j_max = (span.second - a) / period_ms;
  std::int64_t j_lo = floor_div(lo - a + period_ms - 1, period_ms);  // ceil
  std::int64_t j_hi = floor_div(hi - a + period_ms - 1, period_ms) - 1;
  j_lo = std::max<std::int64_t>(j_lo, 1);
  j_hi = std::min(j_hi, j_max);
  return j_hi >= j_lo ? j_hi - j_lo + 1 : 0;
}

}  // namespace detail

// Recomputes budget, day/night split and hourly profile by counting epoch
// grid points inside schedule intervals -- no samples, no derivatives.
// `coverage` lists the first/last sample time of each session.
inline OracleMetrics oracle_metrics(const ActivitySchedule& schedule,
                                    std::span<const DayContext> contexts,
                                    int tz_offset_min,
                                    std::span<const Interval> coverage,
                                    double sample_period_s = 5.0,
                                    std::string cat_id = {}) {
  schedule.validate();
  if (coverage.empty()) throw ParamError("oracle_metrics: no coverage spans");
  const auto period_ms = static_cast<std::int64_t>(sample_period_s * 1000.0);
  const std::int64_t tz = static_cast<std::int64_t>(tz_offset_min) *
                          kMsPerMinute;

  std::map<CivilDate, DayContext> by_date;
  for (const auto& c : contexts) by_date[c.date] = c;

  // Totals.
  std::int64_t total = 0, active_total = 0;
  for (const auto& span : coverage) {
    total += detail::epochs_in(span, period_ms, span.first,
                               span.second + 1);
    for (const auto& iv : schedule.active)
      active_total += detail::epochs_in(span, period_ms, iv.first, iv.second);
  }
  if (total == 0) throw ParamError("oracle_metrics: empty coverage");

  OracleMetrics out;
  out.budget.cat_id = cat_id;
  out.budget.epochs = static_cast<std::size_t>(total);
  out.budget.active_pct =
      100.0 * static_cast<double>(active_total) / static_cast<double>(total);
  out.budget.inactive_pct = 100.0 - out.budget.active_pct;

  // Per local date: phase and hour windows, intersected with coverage and
  // with the active intervals.
  out.split.cat_id = cat_id;
  out.hourly.cat_id = cat_id;
  const std::int64_t day_lo =
      floor_div(schedule.span_start_ms + tz, kMsPerDay);
  const std::int64_t day_hi =
      floor_div(schedule.span_end_ms - 1 + tz, kMsPerDay);
  for (std::int64_t d = day_lo; d <= day_hi; ++d) {
    const CivilDate date = civil_from_days(d);
    const std::int64_t local0 = d * kMsPerDay;  // local midnight
    const auto it = by_date.find(date);
    if (it == by_date.end())
      throw CoverageError("oracle_metrics: no day context for " +
                          format_date(date));
    const std::int64_t sunrise_utc = local0 + it->second.sunrise_local_ms - tz;
    const std::int64_t sunset_utc = local0 + it->second.sunset_local_ms - tz;
    const std::int64_t day_start_utc = local0 - tz;
    const std::int64_t day_end_utc = day_start_utc + kMsPerDay;

    HourlyProfile::DayRow row;
    row.date = date;
    bool row_used = false;

    auto count_window = [&](std::int64_t lo, std::int64_t hi,
                            std::int64_t& epochs, std::int64_t& act) {
      for (const auto& span : coverage) {
        epochs += detail::epochs_in(span, period_ms, lo, hi);
        for (const auto& iv : schedule.active)
          act += detail::epochs_in(span, period_ms,
                                   std::max(lo, iv.first),
                                   std::min(hi, iv.second));
      }
    };

    std::int64_t e_photo = 0, a_photo = 0;
    count_window(std::max(sunrise_utc, day_start_utc),
                 std::min(sunset_utc, day_end_utc), e_photo, a_photo);
    std::int64_t e_day = 0, a_day = 0;
    count_window(day_start_utc, day_end_utc, e_day, a_day);
    out.split.epochs_day += static_cast<std::size_t>(e_photo);
    out.split.active_day += static_cast<std::size_t>(a_photo);
    out.split.epochs_night += static_cast<std::size_t>(e_day - e_photo);
    out.split.active_night += static_cast<std::size_t>(a_day - a_photo);

    for (int h = 0; h < 24; ++h) {
      std::int64_t e_h = 0, a_h = 0;
      count_window(day_start_utc + h * kMsPerHour,
                   day_start_utc + (h + 1) * kMsPerHour, e_h, a_h);
      row.epochs[static_cast<std::size_t>(h)] = static_cast<std::size_t>(e_h);
      row.active[static_cast<std::size_t>(h)] = static_cast<std::size_t>(a_h);
      if (e_h > 0) row_used = true;
    }
    if (row_used) out.hourly.per_day.push_back(row);
  }

  const std::size_t active_all = out.split.active_day + out.split.active_night;
  if (active_all > 0) {
    out.split.day_share_pct = 100.0 * static_cast<double>(out.split.active_day) /
                              static_cast<double>(active_all);
    out.split.night_share_pct = 100.0 - *out.split.day_share_pct;
  }
  const double h_day = static_cast<double>(out.split.epochs_day) *
                       sample_period_s / 3600.0;
  const double h_night = static_cast<double>(out.split.epochs_night) *
                         sample_period_s / 3600.0;
  out.split.day_rate_per_h =
      h_day > 0.0 ? static_cast<double>(out.split.active_day) / h_day : 0.0;
  out.split.night_rate_per_h =
      h_night > 0.0 ? static_cast<double>(out.split.active_night) / h_night
                    : 0.0;

  for (std::size_t h = 0; h < 24; ++h) {
    double sum = 0.0;
    std::size_t days = 0;
    for (const auto& row : out.hourly.per_day) {
      if (row.epochs[h] == 0) continue;
      sum += 100.0 * static_cast<double>(row.active[h]) /
             static_cast<double>(row.epochs[h]);
      ++days;
    }
    out.hourly.days_covered[h] = days;
    out.hourly.mean_pct[h] = days > 0 ? sum / static_cast<double>(days) : 0.0;
  }
  return out;
}

}  // namespace actocat
