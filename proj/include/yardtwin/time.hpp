#pragma once

#include <chrono>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "yardtwin/error.hpp"

namespace yardtwin {

/// UTC instant with one-second resolution, stored as seconds since the Unix
/// epoch. Text form is always "YYYY-MM-DDTHH:MM:SSZ".
struct Timestamp {
  std::int64_t seconds = 0;

  friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

inline constexpr std::int64_t kSecondsPerHour = 3600;
inline constexpr std::int64_t kSecondsPerDay = 86400;

namespace detail {

inline bool parse_fixed_digits(std::string_view text, std::size_t pos,
                               std::size_t width, int& out) {
  if (pos + width > text.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + width; ++i) {
    const char c = text[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

}  // namespace detail

inline Timestamp parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  const bool shape_ok = text.size() == 20 && text[4] == '-' && text[7] == '-' &&
                        text[10] == 'T' && text[13] == ':' && text[16] == ':' &&
                        text[19] == 'Z';
  if (!shape_ok || !detail::parse_fixed_digits(text, 0, 4, y) ||
      !detail::parse_fixed_digits(text, 5, 2, mo) ||
      !detail::parse_fixed_digits(text, 8, 2, d) ||
      !detail::parse_fixed_digits(text, 11, 2, h) ||
      !detail::parse_fixed_digits(text, 14, 2, mi) ||
      !detail::parse_fixed_digits(text, 17, 2, s)) {
    fail(ErrorCode::BadTimestamp, "expected YYYY-MM-DDTHH:MM:SSZ, got '" +
                                      std::string(text) + "'");
  }
  const year_month_day date{year{y}, month{static_cast<unsigned>(mo)},
                            day{static_cast<unsigned>(d)}};
  if (!date.ok() || h > 23 || mi > 59 || s > 59) {
    fail(ErrorCode::BadTimestamp, "out-of-range field in '" + std::string(text) + "'");
  }
  const std::int64_t days = sys_days{date}.time_since_epoch().count();
  return Timestamp{days * kSecondsPerDay + h * kSecondsPerHour + mi * 60 + s};
}

inline std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  std::int64_t days = ts.seconds / kSecondsPerDay;
  std::int64_t rem = ts.seconds % kSecondsPerDay;
  if (rem < 0) {
    rem += kSecondsPerDay;
    --days;
  }
  const year_month_day date{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(date.year()), static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()), static_cast<int>(rem / 3600),
                static_cast<int>(rem % 3600 / 60), static_cast<int>(rem % 60));
  return buf;
}

/// Closed interval [from, to].
struct TimeWindow {
  Timestamp from;
  Timestamp to;

  bool contains(Timestamp t) const { return from <= t && t <= to; }
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

inline TimeWindow make_window(Timestamp from, Timestamp to) {
  if (to < from) {
    fail(ErrorCode::BadWindow, "window start " + format_timestamp(from) +
                                   " is after its end " + format_timestamp(to));
  }
  return TimeWindow{from, to};
}

/// Fractional days between two instants, rounded to one decimal.
inline double dwell_days(Timestamp arrival, Timestamp now) {
  const double days = static_cast<double>(now.seconds - arrival.seconds) /
                      static_cast<double>(kSecondsPerDay);
  return std::round(days * 10.0) / 10.0;
}

}  // namespace yardtwin
