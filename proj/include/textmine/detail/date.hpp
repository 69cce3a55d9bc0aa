#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace textmine::detail {

// Timestamps are UTC seconds since the epoch. Accepted input forms are
// RFC 3339 ("2017-03-16T08:30:00Z", "2017-03-16T08:30:00+01:00", optional
// fractional seconds which are dropped) and plain dates ("2017-03-16").

struct CivilTime {
  int year = 0;
  unsigned month = 1, day = 1, hour = 0, minute = 0, second = 0;
};

inline std::optional<std::int64_t> civil_to_epoch(const CivilTime& c) {
  using namespace std::chrono;
  year_month_day ymd{year{c.year}, month{c.month}, day{c.day}};
  if (!ymd.ok() || c.hour > 23 || c.minute > 59 || c.second > 60) return std::nullopt;
  std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  return days * 86400 + c.hour * 3600 + c.minute * 60 + c.second;
}

inline CivilTime epoch_to_civil(std::int64_t t) {
  using namespace std::chrono;
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  year_month_day ymd{sys_days{std::chrono::days{days}}};
  CivilTime c;
  c.year = static_cast<int>(ymd.year());
  c.month = static_cast<unsigned>(ymd.month());
  c.day = static_cast<unsigned>(ymd.day());
  c.hour = static_cast<unsigned>(rem / 3600);
  c.minute = static_cast<unsigned>((rem % 3600) / 60);
  c.second = static_cast<unsigned>(rem % 60);
  return c;
}

inline bool parse_uint(std::string_view s, std::size_t pos, std::size_t len, unsigned& out) {
  if (pos + len > s.size()) return false;
  unsigned v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + static_cast<unsigned>(c - '0');
  }
  out = v;
  return true;
}

/// RFC 3339 or "YYYY-MM-DD"; nullopt on anything else.
inline std::optional<std::int64_t> parse_timestamp(std::string_view s) {
  unsigned y, mo, d;
  if (s.size() < 10) return std::nullopt;
  if (!parse_uint(s, 0, 4, y) || s[4] != '-' || !parse_uint(s, 5, 2, mo) ||
      s[7] != '-' || !parse_uint(s, 8, 2, d))
    return std::nullopt;
  CivilTime c;
  c.year = static_cast<int>(y);
  c.month = mo;
  c.day = d;
  if (s.size() == 10) return civil_to_epoch(c);

  if (s[10] != 'T' && s[10] != 't') return std::nullopt;
  if (!parse_uint(s, 11, 2, c.hour) || s.size() < 19 || s[13] != ':' ||
      !parse_uint(s, 14, 2, c.minute) || s[16] != ':' ||
      !parse_uint(s, 17, 2, c.second))
    return std::nullopt;
  std::size_t i = 19;
  if (i < s.size() && s[i] == '.') {  // fractional seconds, ignored
    ++i;
    std::size_t digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
    if (digits == 0) return std::nullopt;
  }
  if (i >= s.size()) return std::nullopt;
  std::int64_t offset = 0;
  if (s[i] == 'Z' || s[i] == 'z') {
    ++i;
  } else if (s[i] == '+' || s[i] == '-') {
    int sign = s[i] == '+' ? 1 : -1;
    unsigned oh, om;
    if (!parse_uint(s, i + 1, 2, oh) || i + 3 >= s.size() || s[i + 3] != ':' ||
        !parse_uint(s, i + 4, 2, om) || oh > 23 || om > 59)
      return std::nullopt;
    offset = sign * (static_cast<std::int64_t>(oh) * 3600 + om * 60);
    i += 6;
  } else {
    return std::nullopt;
  }
  if (i != s.size()) return std::nullopt;
  auto epoch = civil_to_epoch(c);
  if (!epoch) return std::nullopt;
  return *epoch - offset;
}

inline std::string format_rfc3339(std::int64_t t) {
  CivilTime c = epoch_to_civil(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u:%02uZ", c.year,
                c.month, c.day, c.hour, c.minute, c.second);
  return buf;
}

inline std::string month_key(std::int64_t t) {
  CivilTime c = epoch_to_civil(t);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", c.year, c.month);
  return buf;
}

inline std::string day_key(std::int64_t t) {
  CivilTime c = epoch_to_civil(t);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.year, c.month, c.day);
  return buf;
}

}  // namespace textmine::detail
