#pragma once

// Per-cat circadian analytics: time budget, day/night activity repartition
// and hourly activity profile, plus the cohort aggregation with the 2-sigma
// outlier rule. All denominators count only epochs inside sessions, so
// collar-recharge gaps never bias a metric.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "actocat/ephemeris.hpp"
#include "actocat/error.hpp"
#include "actocat/time.hpp"
#include "actocat/types.hpp"

namespace actocat {

struct TimeBudget {
  std::string cat_id;
  double active_pct = 0.0;
  double inactive_pct = 100.0;
  std::size_t epochs = 0;
};

inline TimeBudget time_budget(const ActivityLevelSeries& levels) {
  if (levels.level.empty()) throw ParamError("time_budget: no epochs");
  std::size_t active = 0;
  for (auto v : levels.level) active += v;
  TimeBudget b;
  b.cat_id = levels.cat_id;
  b.epochs = levels.level.size();
  b.active_pct = 100.0 * static_cast<double>(active) /
                 static_cast<double>(b.epochs);
  b.inactive_pct = 100.0 - b.active_pct;
  return b;
}

struct DayNightSplit {
  std::string cat_id;
  // Shares of total activity. Empty when the cat was never active.
  std::optional<double> day_share_pct;
  std::optional<double> night_share_pct;
  // Active epochs per hour of covered phase time.
  double day_rate_per_h = 0.0;
  double night_rate_per_h = 0.0;
  std::size_t active_day = 0;
  std::size_t active_night = 0;
  std::size_t epochs_day = 0;
  std::size_t epochs_night = 0;
};

namespace detail {

inline const DayContext& context_for(
    const std::map<CivilDate, DayContext>& by_date, const CivilDate& date) {
  const auto it = by_date.find(date);
  if (it == by_date.end())
    throw CoverageError("daynight_split: no day context for " +
                        format_date(date));
  return it->second;
}

}  // namespace detail

inline DayNightSplit daynight_split(const ActivityLevelSeries& levels,
                                    std::span<const DayContext> contexts,
                                    int tz_offset_min) {
  if (levels.level.empty()) throw ParamError("daynight_split: no epochs");
  std::map<CivilDate, DayContext> by_date;
  for (const auto& c : contexts) by_date[c.date] = c;

  DayNightSplit s;
  s.cat_id = levels.cat_id;
  const std::int64_t tz_ms =
      static_cast<std::int64_t>(tz_offset_min) * kMsPerMinute;
  for (std::size_t i = 0; i < levels.t_ms.size(); ++i) {
    const std::int64_t local = levels.t_ms[i] + tz_ms;
    const DayContext& ctx =
        detail::context_for(by_date, date_of(local));
    const bool day = phase_of(local, ctx) == PhotoPhase::photophase;
    if (day) {
      ++s.epochs_day;
      s.active_day += levels.level[i];
    } else {
      ++s.epochs_night;
      s.active_night += levels.level[i];
    }
  }
  const std::size_t active_total = s.active_day + s.active_night;
  if (active_total > 0) {
    s.day_share_pct = 100.0 * static_cast<double>(s.active_day) /
                      static_cast<double>(active_total);
    s.night_share_pct = 100.0 - *s.day_share_pct;
  }
  const double h_day =
      static_cast<double>(s.epochs_day) * levels.period_s / 3600.0;
  const double h_night =
      static_cast<double>(s.epochs_night) * levels.period_s / 3600.0;
  s.day_rate_per_h = h_day > 0.0 ? static_cast<double>(s.active_day) / h_day
                                 : 0.0;
  s.night_rate_per_h =
      h_night > 0.0 ? static_cast<double>(s.active_night) / h_night : 0.0;
  return s;
}

// Proportion of active epochs per local hour, averaged per-day-first so each
// observed day weighs equally. The per-day matrix feeds the hourly ANOVA.
struct HourlyProfile {
  struct DayRow {
    CivilDate date;
    std::array<std::size_t, 24> epochs{};
    std::array<std::size_t, 24> active{};
  };
  std::string cat_id;
  std::array<double, 24> mean_pct{};       // over days with coverage
  std::array<std::size_t, 24> days_covered{};
  std::vector<DayRow> per_day;             // ordered by date
};

inline HourlyProfile hourly_profile(const ActivityLevelSeries& levels,
                                    int tz_offset_min) {
  HourlyProfile prof;
  prof.cat_id = levels.cat_id;
  const std::int64_t tz_ms =
      static_cast<std::int64_t>(tz_offset_min) * kMsPerMinute;
  std::map<CivilDate, HourlyProfile::DayRow> rows;
  for (std::size_t i = 0; i < levels.t_ms.size(); ++i) {
    const std::int64_t local = levels.t_ms[i] + tz_ms;
    const CivilDate date = date_of(local);
    const auto hour = static_cast<std::size_t>(ms_of_day(local) / kMsPerHour);
    auto& row = rows[date];
    row.date = date;
    ++row.epochs[hour];
    row.active[hour] += levels.level[i];
  }
  for (auto& [date, row] : rows) prof.per_day.push_back(row);
  for (std::size_t h = 0; h < 24; ++h) {
    double sum = 0.0;
    std::size_t days = 0;
    for (const auto& row : prof.per_day) {
      if (row.epochs[h] == 0) continue;
      sum += 100.0 * static_cast<double>(row.active[h]) /
             static_cast<double>(row.epochs[h]);
      ++days;
    }
    prof.days_covered[h] = days;
    prof.mean_pct[h] = days > 0 ? sum / static_cast<double>(days) : 0.0;
  }
  return prof;
}

// Cohort mean and sample (n-1) standard deviation with the 2-sigma outlier
// rule: |x - mean| > 2 * std.
struct CohortSummary {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<std::size_t> outliers;  // indices into the input
};

inline CohortSummary cohort_aggregate(std::span<const double> values) {
  if (values.size() < 2)
    throw ParamError("cohort_aggregate: need at least 2 values");
  CohortSummary s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::fabs(values[i] - s.mean) > 2.0 * s.stddev) s.outliers.push_back(i);
  return s;
}

}  // namespace actocat
