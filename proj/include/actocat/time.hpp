#pragma once

// Timestamp handling. Everything internal is UTC milliseconds since the Unix
// epoch (int64); local time is derived by adding a fixed tz offset in minutes.
// The canonical text form is "YYYY-MM-DDTHH:MM:SS.mmmZ" and round-trips
// bit-exactly through parse_timestamp/format_utc.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace actocat {

constexpr std::int64_t kMsPerSecond = 1000;
constexpr std::int64_t kMsPerMinute = 60 * kMsPerSecond;
constexpr std::int64_t kMsPerHour = 60 * kMsPerMinute;
constexpr std::int64_t kMsPerDay = 24 * kMsPerHour;

struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  auto operator<=>(const CivilDate&) const = default;
};

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
constexpr std::int64_t days_from_civil(const CivilDate& cd) noexcept {
  std::int64_t y = cd.year;
  const unsigned m = static_cast<unsigned>(cd.month);
  const unsigned d = static_cast<unsigned>(cd.day);
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr CivilDate civil_from_days(std::int64_t z) noexcept {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
                   static_cast<int>(d)};
}

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Millisecond timestamp for a UTC civil date + time of day.
constexpr std::int64_t utc_ms(const CivilDate& cd, int hour = 0, int minute = 0,
                              int second = 0, int ms = 0) noexcept {
  return days_from_civil(cd) * kMsPerDay + hour * kMsPerHour +
         minute * kMsPerMinute + second * kMsPerSecond + ms;
}

constexpr CivilDate date_of(std::int64_t t_ms) noexcept {
  return civil_from_days(floor_div(t_ms, kMsPerDay));
}

constexpr std::int64_t ms_of_day(std::int64_t t_ms) noexcept {
  return t_ms - floor_div(t_ms, kMsPerDay) * kMsPerDay;
}

inline std::string format_utc(std::int64_t t_ms) {
  const CivilDate cd = date_of(t_ms);
  const std::int64_t rem = ms_of_day(t_ms);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                cd.year, cd.month, cd.day, static_cast<int>(rem / kMsPerHour),
                static_cast<int>((rem / kMsPerMinute) % 60),
                static_cast<int>((rem / kMsPerSecond) % 60),
                static_cast<int>(rem % 1000));
  return buf;
}

inline std::string format_date(const CivilDate& cd) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", cd.year, cd.month, cd.day);
  return buf;
}

// "HH:MM", "HH:MM:SS" or "HH:MM:SS.mmm" within a day.
inline std::string format_ms_of_day(std::int64_t ms) {
  char buf[24];
  if (ms % kMsPerSecond == 0 && (ms / kMsPerSecond) % 60 == 0) {
    std::snprintf(buf, sizeof(buf), "%02d:%02d",
                  static_cast<int>(ms / kMsPerHour),
                  static_cast<int>((ms / kMsPerMinute) % 60));
  } else if (ms % kMsPerSecond == 0) {
    std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d",
                  static_cast<int>(ms / kMsPerHour),
                  static_cast<int>((ms / kMsPerMinute) % 60),
                  static_cast<int>((ms / kMsPerSecond) % 60));
  } else {
    std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d.%03d",
                  static_cast<int>(ms / kMsPerHour),
                  static_cast<int>((ms / kMsPerMinute) % 60),
                  static_cast<int>((ms / kMsPerSecond) % 60),
                  static_cast<int>(ms % 1000));
  }
  return buf;
}

namespace detail {

inline bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace detail

// Date in "YYYY-MM-DD" or "MM/DD/YYYY" (data-logger RTC style).
inline std::optional<CivilDate> parse_date(std::string_view s) {
  CivilDate cd;
  const char sep = s.find('/') != std::string_view::npos ? '/' : '-';
  const auto p1 = s.find(sep);
  if (p1 == std::string_view::npos) return std::nullopt;
  const auto p2 = s.find(sep, p1 + 1);
  if (p2 == std::string_view::npos) return std::nullopt;
  int a, b, c;
  if (!detail::parse_int(s.substr(0, p1), a) ||
      !detail::parse_int(s.substr(p1 + 1, p2 - p1 - 1), b) ||
      !detail::parse_int(s.substr(p2 + 1), c))
    return std::nullopt;
  if (sep == '/') {
    cd = CivilDate{c, a, b};
  } else {
    cd = CivilDate{a, b, c};
  }
  if (cd.month < 1 || cd.month > 12 || cd.day < 1 || cd.day > 31)
    return std::nullopt;
  return cd;
}

// Time of day "HH:MM[:SS[.fff]]" -> milliseconds into the day.
inline std::optional<std::int64_t> parse_time_of_day(std::string_view s) {
  int h = 0, m = 0, sec = 0, ms = 0;
  const auto p1 = s.find(':');
  if (p1 == std::string_view::npos) return std::nullopt;
  if (!detail::parse_int(s.substr(0, p1), h)) return std::nullopt;
  const auto p2 = s.find(':', p1 + 1);
  if (p2 == std::string_view::npos) {
    if (!detail::parse_int(s.substr(p1 + 1), m)) return std::nullopt;
  } else {
    if (!detail::parse_int(s.substr(p1 + 1, p2 - p1 - 1), m))
      return std::nullopt;
    std::string_view rest = s.substr(p2 + 1);
    const auto dot = rest.find('.');
    if (dot == std::string_view::npos) {
      if (!detail::parse_int(rest, sec)) return std::nullopt;
    } else {
      if (!detail::parse_int(rest.substr(0, dot), sec)) return std::nullopt;
      std::string_view frac = rest.substr(dot + 1);
      if (frac.empty() || frac.size() > 9) return std::nullopt;
      int scale = 100;
      for (char ch : frac.substr(0, 3)) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) return std::nullopt;
        ms += (ch - '0') * scale;
        scale /= 10;
      }
    }
  }
  if (h < 0 || h > 23 || m < 0 || m > 59 || sec < 0 || sec > 60)
    return std::nullopt;
  return h * kMsPerHour + m * kMsPerMinute + sec * kMsPerSecond + ms;
}

// Combined timestamp "YYYY-MM-DD[T ]HH:MM:SS[.fff][Z]". A trailing 'Z' marks
// UTC; otherwise the caller decides which offset applies.
struct ParsedTimestamp {
  std::int64_t t_ms;  // as written, no offset applied
  bool explicit_utc;
};

inline std::optional<ParsedTimestamp> parse_timestamp(std::string_view s) {
  bool zulu = false;
  if (!s.empty() && (s.back() == 'Z' || s.back() == 'z')) {
    zulu = true;
    s.remove_suffix(1);
  }
  auto sep = s.find('T');
  if (sep == std::string_view::npos) sep = s.find(' ');
  if (sep == std::string_view::npos) return std::nullopt;
  const auto date = parse_date(s.substr(0, sep));
  const auto tod = parse_time_of_day(s.substr(sep + 1));
  if (!date || !tod) return std::nullopt;
  return ParsedTimestamp{days_from_civil(*date) * kMsPerDay + *tod, zulu};
}

}  // namespace actocat
