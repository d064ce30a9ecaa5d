#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>

#include "actocat/rhythm.hpp"

using namespace actocat;

namespace {

// Contexts with fixed sun times for deterministic fixtures (tz offset 0).
std::vector<DayContext> fixed_contexts(const CivilDate& from, int days,
                                       std::int64_t sunrise_ms,
                                       std::int64_t sunset_ms) {
  std::vector<DayContext> out;
  for (int d = 0; d < days; ++d) {
    DayContext ctx;
    ctx.date = civil_from_days(days_from_civil(from) + d);
    ctx.sunrise_local_ms = sunrise_ms;
    ctx.sunset_local_ms = sunset_ms;
    out.push_back(ctx);
  }
  return out;
}

// Level series on the 5 s grid over whole days starting at UTC midnight.
ActivityLevelSeries grid_series(const CivilDate& start, int days,
                                const std::function<int(std::int64_t)>& level_at) {
  ActivityLevelSeries s;
  s.cat_id = "fixture";
  const std::int64_t t0 = days_from_civil(start) * kMsPerDay;
  const int per_day = static_cast<int>(kMsPerDay / 5000);
  for (int i = 0; i < days * per_day; ++i) {
    const std::int64_t t = t0 + static_cast<std::int64_t>(i) * 5000;
    s.t_ms.push_back(t);
    s.level.push_back(static_cast<std::uint8_t>(level_at(t)));
  }
  return s;
}

}  // namespace

TEST_CASE("time budget basics") {
  ActivityLevelSeries s;
  s.cat_id = "a";
  SECTION("all zeros") {
    for (int i = 0; i < 100; ++i) {
      s.t_ms.push_back(i * 5000);
      s.level.push_back(0);
    }
    const auto b = time_budget(s);
    CHECK(b.active_pct == 0.0);
    CHECK(b.inactive_pct == 100.0);
  }
  SECTION("alternating epochs give 50%") {
    for (int i = 0; i < 100; ++i) {
      s.t_ms.push_back(i * 5000);
      s.level.push_back(i % 2);
    }
    CHECK(time_budget(s).active_pct == Catch::Approx(50.0).margin(1e-12));
  }
  SECTION("empty throws") { CHECK_THROWS_AS(time_budget(s), ParamError); }
}

TEST_CASE("budget complementarity is exact") {
  std::mt19937_64 rng(113);
  std::bernoulli_distribution coin(0.145);
  ActivityLevelSeries s;
  for (int i = 0; i < 12345; ++i) {
    s.t_ms.push_back(i * 5000);
    s.level.push_back(coin(rng) ? 1 : 0);
  }
  const auto b = time_budget(s);
  CHECK(b.active_pct + b.inactive_pct == 100.0);
}

TEST_CASE("all activity at noon lands fully in the day share") {
  const CivilDate d0{2020, 9, 21};
  const auto ctxs = fixed_contexts(d0, 2, 6 * kMsPerHour, 18 * kMsPerHour);
  const auto s = grid_series(d0, 2, [&](std::int64_t t) {
    const std::int64_t m = ms_of_day(t);
    return (m >= 12 * kMsPerHour && m < 13 * kMsPerHour) ? 1 : 0;
  });
  const auto split = daynight_split(s, ctxs, 0);
  REQUIRE(split.day_share_pct.has_value());
  CHECK(*split.day_share_pct == 100.0);
  CHECK(*split.night_share_pct == 0.0);
  CHECK(split.day_rate_per_h > 0.0);
  CHECK(split.night_rate_per_h == 0.0);
}

TEST_CASE("shares always sum to 100") {
  std::mt19937_64 rng(127);
  std::bernoulli_distribution coin(0.2);
  const CivilDate d0{2020, 9, 21};
  const auto ctxs = fixed_contexts(d0, 3, 7 * kMsPerHour, 19 * kMsPerHour);
  const auto s =
      grid_series(d0, 3, [&](std::int64_t) { return coin(rng) ? 1 : 0; });
  const auto split = daynight_split(s, ctxs, 0);
  REQUIRE(split.day_share_pct.has_value());
  CHECK(*split.day_share_pct + *split.night_share_pct ==
        Catch::Approx(100.0).margin(1e-9));
  // share times total activity recovers the phase-wise counts
  const double total = static_cast<double>(split.active_day +
                                           split.active_night);
  CHECK(*split.day_share_pct / 100.0 * total ==
        Catch::Approx(static_cast<double>(split.active_day)).margin(1e-6));
}

TEST_CASE("uniform activity splits by the photophase fraction") {
  // 11:37 of daylight out of 24 h -> day share about 48.4%
  const CivilDate d0{2020, 9, 21};
  const std::int64_t sunrise = 6 * kMsPerHour;
  const std::int64_t sunset = sunrise + 11 * kMsPerHour + 37 * kMsPerMinute;
  const auto ctxs = fixed_contexts(d0, 2, sunrise, sunset);
  const auto s = grid_series(d0, 2, [](std::int64_t) { return 1; });
  const auto split = daynight_split(s, ctxs, 0);
  REQUIRE(split.day_share_pct.has_value());
  const double expected = 100.0 * (11.0 + 37.0 / 60.0) / 24.0;
  CHECK(*split.day_share_pct == Catch::Approx(expected).margin(1e-6));
}

TEST_CASE("no activity leaves the share undefined but rates zero") {
  const CivilDate d0{2020, 9, 21};
  const auto ctxs = fixed_contexts(d0, 1, 6 * kMsPerHour, 18 * kMsPerHour);
  const auto s = grid_series(d0, 1, [](std::int64_t) { return 0; });
  const auto split = daynight_split(s, ctxs, 0);
  CHECK_FALSE(split.day_share_pct.has_value());
  CHECK(split.day_rate_per_h == 0.0);
  CHECK(split.night_rate_per_h == 0.0);
}

TEST_CASE("missing context date is a coverage error") {
  const CivilDate d0{2020, 9, 21};
  const auto ctxs = fixed_contexts(d0, 1, 6 * kMsPerHour, 18 * kMsPerHour);
  const auto s = grid_series(d0, 2, [](std::int64_t) { return 1; });
  CHECK_THROWS_AS(daynight_split(s, ctxs, 0), CoverageError);
}

TEST_CASE("hourly profile basics") {
  const CivilDate d0{2020, 9, 21};
  SECTION("all active means every bin at 100") {
    const auto s = grid_series(d0, 2, [](std::int64_t) { return 1; });
    const auto prof = hourly_profile(s, 0);
    for (int h = 0; h < 24; ++h) {
      CHECK(prof.mean_pct[h] == 100.0);
      CHECK(prof.days_covered[h] == 2);
    }
  }
  SECTION("activity only 09:00-10:00 local") {
    const auto s = grid_series(d0, 1, [](std::int64_t t) {
      const std::int64_t m = ms_of_day(t);
      return (m >= 9 * kMsPerHour && m < 10 * kMsPerHour) ? 1 : 0;
    });
    const auto prof = hourly_profile(s, 0);
    for (int h = 0; h < 24; ++h)
      CHECK(prof.mean_pct[h] == (h == 9 ? 100.0 : 0.0));
  }
  SECTION("tz offset shifts the bins") {
    const auto s = grid_series(d0, 1, [](std::int64_t t) {
      return ms_of_day(t) < kMsPerHour ? 1 : 0;  // 00:00-01:00 UTC
    });
    const auto prof = hourly_profile(s, 120);  // UTC+2
    CHECK(prof.mean_pct[2] == 100.0);
    CHECK(prof.mean_pct[0] == 0.0);
  }
}

TEST_CASE("epoch-weighted hourly bins recover the overall budget") {
  std::mt19937_64 rng(131);
  std::bernoulli_distribution coin(0.3);
  const CivilDate d0{2020, 9, 21};
  const auto s =
      grid_series(d0, 3, [&](std::int64_t) { return coin(rng) ? 1 : 0; });
  const auto prof = hourly_profile(s, 0);
  const auto budget = time_budget(s);
  double weighted = 0.0;
  std::size_t total = 0;
  for (const auto& row : prof.per_day) {
    for (int h = 0; h < 24; ++h) {
      if (row.epochs[h] == 0) continue;
      weighted += static_cast<double>(row.active[h]);
      total += row.epochs[h];
    }
  }
  CHECK(100.0 * weighted / static_cast<double>(total) ==
        Catch::Approx(budget.active_pct).margin(1e-9));
}

TEST_CASE("epochs in session gaps count nowhere") {
  // One hour of data, a long gap, then another hour: metrics must see
  // exactly the epochs present, not the wall-clock span.
  ActivityLevelSeries s;
  s.cat_id = "gappy";
  const std::int64_t t0 = days_from_civil({2020, 9, 21}) * kMsPerDay;
  for (int i = 0; i < 720; ++i) {  // 1 h active
    s.t_ms.push_back(t0 + 9 * kMsPerHour + i * 5000);
    s.level.push_back(1);
  }
  for (int i = 0; i < 720; ++i) {  // 1 h inactive, 6 h later
    s.t_ms.push_back(t0 + 15 * kMsPerHour + i * 5000);
    s.level.push_back(0);
  }
  const auto b = time_budget(s);
  CHECK(b.epochs == 1440);
  CHECK(b.active_pct == Catch::Approx(50.0).margin(1e-12));
  const auto ctxs = fixed_contexts({2020, 9, 21}, 1, 6 * kMsPerHour,
                                   18 * kMsPerHour);
  const auto split = daynight_split(s, ctxs, 0);
  CHECK(split.epochs_day + split.epochs_night == 1440);
  const auto prof = hourly_profile(s, 0);
  CHECK(prof.days_covered[9] == 1);
  CHECK(prof.days_covered[12] == 0);  // gap hour has no coverage
}

TEST_CASE("cohort aggregation") {
  SECTION("identical values: zero spread, no outliers") {
    const std::vector<double> v{14.5, 14.5, 14.5};
    const auto s = cohort_aggregate(v);
    CHECK(s.stddev == 0.0);
    CHECK(s.outliers.empty());
  }
  SECTION("values {1,2,3}: mean 2, sample std 1") {
    const std::vector<double> v{1.0, 2.0, 3.0};
    const auto s = cohort_aggregate(v);
    CHECK(s.mean == Catch::Approx(2.0).margin(1e-12));
    CHECK(s.stddev == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("a single far-below cat is flagged") {
    // Eleven cats near 15% and one at 7.7%: cohort mean close to 14.5 with
    // std close to 3.26, and only the low cat beyond twice the std.
    std::vector<double> v{17.6, 12.6, 17.6, 12.6, 17.6, 12.6,
                          17.6, 12.6, 17.6, 12.6, 15.6, 7.7};
    const auto s = cohort_aggregate(v);
    CHECK(s.mean == Catch::Approx(14.5).margin(0.2));
    REQUIRE(s.outliers.size() == 1);
    CHECK(s.outliers.front() == 11);
    CHECK(std::fabs(v[11] - s.mean) > 2.0 * s.stddev);
    for (std::size_t i = 0; i < 11; ++i)
      CHECK(std::fabs(v[i] - s.mean) <= 2.0 * s.stddev);
  }
  SECTION("fewer than two values throw") {
    const std::vector<double> v{1.0};
    CHECK_THROWS_AS(cohort_aggregate(v), ParamError);
  }
}
