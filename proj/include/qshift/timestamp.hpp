#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "qshift/errors.hpp"
#include "qshift/types.hpp"

namespace qshift {

inline constexpr std::int64_t kMsPerDay = 86'400'000;

namespace detail {

// Howard Hinnant's civil-date algorithms (public domain).
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
  std::int64_t year;
  unsigned month;
  unsigned day;
};

constexpr CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {y + (m <= 2), m, d};
}

inline bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

// "HH:MM:SS" with optional ".fff" fraction; returns ms within the day.
inline std::optional<std::int64_t> parse_time_of_day(std::string_view s) {
  int h = 0, m = 0, sec = 0;
  if (s.size() < 8 || s[2] != ':' || s[5] != ':') return std::nullopt;
  if (!parse_fixed_uint(s, 0, 2, h) || !parse_fixed_uint(s, 3, 2, m) ||
      !parse_fixed_uint(s, 6, 2, sec))
    return std::nullopt;
  if (h > 23 || m > 59 || sec > 59) return std::nullopt;
  std::int64_t ms = 0;
  std::size_t rest = 8;
  if (rest < s.size() && s[rest] == '.') {
    ++rest;
    std::int64_t scale = 100;
    std::size_t digits = 0;
    while (rest < s.size() && s[rest] >= '0' && s[rest] <= '9') {
      if (digits < 3) ms += (s[rest] - '0') * scale;
      scale /= 10;
      ++rest;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
  }
  if (rest != s.size()) return std::nullopt;
  return (static_cast<std::int64_t>(h) * 3600 + m * 60 + sec) * 1000 + ms;
}

}  // namespace detail

/// "YYYY-MM-DD" at midnight, as epoch milliseconds.
inline std::optional<TimestampMs> parse_date(std::string_view s) {
  int y = 0, mo = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!detail::parse_fixed_uint(s, 0, 4, y) || !detail::parse_fixed_uint(s, 5, 2, mo) ||
      !detail::parse_fixed_uint(s, 8, 2, d))
    return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
  return detail::days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * kMsPerDay;
}

/// "YYYY-MM-DD HH:MM:SS[.fff]" or with a 'T' separator.
inline std::optional<TimestampMs> parse_iso_datetime(std::string_view s) {
  if (s.size() < 19) return std::nullopt;
  if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
  auto day = parse_date(s.substr(0, 10));
  if (!day) return std::nullopt;
  auto tod = detail::parse_time_of_day(s.substr(11));
  if (!tod) return std::nullopt;
  return *day + *tod;
}

inline std::string format_timestamp(TimestampMs ts) {
  std::int64_t day = ts >= 0 ? ts / kMsPerDay : (ts - (kMsPerDay - 1)) / kMsPerDay;
  std::int64_t within = ts - day * kMsPerDay;
  auto civil = detail::civil_from_days(day);
  int ms = static_cast<int>(within % 1000);
  std::int64_t secs = within / 1000;
  char buf[64];
  if (ms == 0) {
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02d:%02d:%02d",
                  static_cast<long long>(civil.year), civil.month, civil.day,
                  static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                  static_cast<int>(secs % 60));
  } else {
    std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02d:%02d:%02d.%03d",
                  static_cast<long long>(civil.year), civil.month, civil.day,
                  static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                  static_cast<int>(secs % 60), ms);
  }
  return std::string(buf);
}

/// Per-file timestamp reader. Accepts ISO-8601 datetimes directly; bare
/// "HH:MM:SS" needs a session date and gets advanced by one day whenever the
/// time of day runs backwards (midnight rollover).
class TimestampReader {
 public:
  explicit TimestampReader(std::optional<TimestampMs> session_date = std::nullopt)
      : session_date_(session_date) {}

  /// nullopt = malformed field. Throws UsageError if a bare time of day is
  /// seen without a session date.
  std::optional<TimestampMs> read(std::string_view field) {
    if (auto abs = parse_iso_datetime(field)) return abs;
    auto tod = detail::parse_time_of_day(field);
    if (!tod) return std::nullopt;
    if (!session_date_)
      throw UsageError("timestamps use bare HH:MM:SS; supply the session date (--date YYYY-MM-DD)");
    if (prev_tod_ && *tod < *prev_tod_) rollover_ms_ += kMsPerDay;
    prev_tod_ = *tod;
    return *session_date_ + rollover_ms_ + *tod;
  }

 private:
  std::optional<TimestampMs> session_date_;
  std::int64_t rollover_ms_ = 0;
  std::optional<std::int64_t> prev_tod_;
};

}  // namespace qshift
