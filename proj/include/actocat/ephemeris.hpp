#pragma once

// Per-date sunrise/sunset context, computed with the NOAA solar-position
// method (declination, equation of time, hour angle at zenith 90.833 deg) or
// supplied as a table. Times are local to a fixed tz offset; the study
// window carries no DST change, so offsets never move.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "actocat/error.hpp"
#include "actocat/time.hpp"

namespace actocat {

struct GeoSite {
  double latitude_deg = 0.0;    // [-90, 90]
  double longitude_deg = 0.0;   // [-180, 180], east positive
  int tz_offset_min = 0;
};

enum class PhotoPhase { photophase, scotophase };

struct DayContext {
  CivilDate date;
  std::int64_t sunrise_local_ms = 0;  // ms since local midnight
  std::int64_t sunset_local_ms = 0;

  std::int64_t daylight_ms() const { return sunset_local_ms - sunrise_local_ms; }
};

namespace detail {

constexpr double deg2rad(double d) { return d * 3.14159265358979323846 / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / 3.14159265358979323846; }

struct SolarTerms {
  double declination_deg;
  double equation_of_time_min;
};

inline SolarTerms solar_terms(double julian_century) {
  const double jc = julian_century;
  const double gml = std::fmod(
      280.46646 + jc * (36000.76983 + jc * 0.0003032), 360.0);
  const double gma = 357.52911 + jc * (35999.05029 - 0.0001537 * jc);
  const double ecc = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc);
  const double ceq =
      std::sin(deg2rad(gma)) * (1.914602 - jc * (0.004817 + 0.000014 * jc)) +
      std::sin(deg2rad(2.0 * gma)) * (0.019993 - 0.000101 * jc) +
      std::sin(deg2rad(3.0 * gma)) * 0.000289;
  const double true_long = gml + ceq;
  const double omega = 125.04 - 1934.136 * jc;
  const double app_long = true_long - 0.00569 -
                          0.00478 * std::sin(deg2rad(omega));
  const double mean_obliq =
      23.0 + (26.0 + (21.448 - jc * (46.815 + jc * (0.00059 -
                                                    jc * 0.001813))) /
                         60.0) /
                 60.0;
  const double obliq = mean_obliq + 0.00256 * std::cos(deg2rad(omega));
  const double decl = rad2deg(
      std::asin(std::sin(deg2rad(obliq)) * std::sin(deg2rad(app_long))));
  const double vary = std::tan(deg2rad(obliq / 2.0)) *
                      std::tan(deg2rad(obliq / 2.0));
  const double eot =
      4.0 * rad2deg(vary * std::sin(2.0 * deg2rad(gml)) -
                    2.0 * ecc * std::sin(deg2rad(gma)) +
                    4.0 * ecc * vary * std::sin(deg2rad(gma)) *
                        std::cos(2.0 * deg2rad(gml)) -
                    0.5 * vary * vary * std::sin(4.0 * deg2rad(gml)) -
                    1.25 * ecc * ecc * std::sin(2.0 * deg2rad(gma)));
  return SolarTerms{decl, eot};
}

}  // namespace detail

// Sunrise/sunset for one civil date at the site, evaluated at local noon.
// Throws NoEventError when the sun never crosses the 90.833 deg zenith
// (polar day or night).
inline DayContext solar_events(const GeoSite& site, const CivilDate& date) {
  if (site.latitude_deg < -90.0 || site.latitude_deg > 90.0 ||
      site.longitude_deg < -180.0 || site.longitude_deg > 180.0)
    throw ParamError("solar_events: site out of range");

  const double tz_hours = static_cast<double>(site.tz_offset_min) / 60.0;
  // Julian day at 12:00 local time.
  const double jd = static_cast<double>(days_from_civil(date)) + 2440587.5 +
                    0.5 - tz_hours / 24.0;
  const auto terms = detail::solar_terms((jd - 2451545.0) / 36525.0);

  const double lat = detail::deg2rad(site.latitude_deg);
  const double decl = detail::deg2rad(terms.declination_deg);
  const double cos_ha =
      std::cos(detail::deg2rad(90.833)) / (std::cos(lat) * std::cos(decl)) -
      std::tan(lat) * std::tan(decl);
  if (cos_ha < -1.0 || cos_ha > 1.0)
    throw NoEventError("solar_events: no sunrise/sunset on " +
                       format_date(date));
  const double ha_deg = detail::rad2deg(std::acos(cos_ha));

  const double solar_noon_min = 720.0 - 4.0 * site.longitude_deg -
                                terms.equation_of_time_min +
                                static_cast<double>(site.tz_offset_min);
  const double sunrise_min = solar_noon_min - 4.0 * ha_deg;
  const double sunset_min = solar_noon_min + 4.0 * ha_deg;

  DayContext ctx;
  ctx.date = date;
  ctx.sunrise_local_ms = std::llround(sunrise_min * 60.0 * 1000.0);
  ctx.sunset_local_ms = std::llround(sunset_min * 60.0 * 1000.0);
  return ctx;
}

using SunTable = std::map<CivilDate, DayContext>;

// One context per date in [from, to]; a table row overrides computation.
inline std::vector<DayContext> build_day_contexts(
    const std::optional<GeoSite>& site, const SunTable& table,
    const CivilDate& from, const CivilDate& to) {
  if (days_from_civil(from) > days_from_civil(to))
    throw ParamError("build_day_contexts: empty date range");
  std::vector<DayContext> out;
  for (std::int64_t d = days_from_civil(from); d <= days_from_civil(to);
       ++d) {
    const CivilDate date = civil_from_days(d);
    if (const auto it = table.find(date); it != table.end()) {
      out.push_back(it->second);
    } else if (site) {
      out.push_back(solar_events(*site, date));
    } else {
      throw CoverageError("build_day_contexts: no table entry and no site "
                          "for " + format_date(date));
    }
  }
  return out;
}

// Half-open photophase [sunrise, sunset): sunrise itself is photophase,
// sunset is scotophase.
inline PhotoPhase phase_of(std::int64_t t_local_ms, const DayContext& ctx) {
  if (date_of(t_local_ms) != ctx.date)
    throw ParamError("phase_of: timestamp not on context date");
  const std::int64_t m = ms_of_day(t_local_ms);
  return (m >= ctx.sunrise_local_ms && m < ctx.sunset_local_ms)
             ? PhotoPhase::photophase
             : PhotoPhase::scotophase;
}

// Named site presets for the CLI.
inline std::optional<GeoSite> site_preset(const std::string& name) {
  if (name == "normandy") return GeoSite{49.46, 1.75, 120};
  return std::nullopt;
}

}  // namespace actocat
