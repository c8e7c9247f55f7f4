#include "dse/timestamp.hpp"

#include <chrono>
#include <cstdio>

#include "dse/strings.hpp"

namespace dse {

namespace {

using namespace std::chrono;

constexpr std::int64_t kDay = 86400;

bool digits(std::string_view s, std::size_t pos, std::size_t n, int& out) {
  if (pos + n > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::optional<std::int64_t> civil(int y, int m, int d) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return static_cast<std::int64_t>(sys_days{ymd}.time_since_epoch().count()) * kDay;
}

// Parses "Z", "+HH", "+HHMM", "+HH:MM" (or '-'); returns offset seconds.
std::optional<std::int64_t> parse_offset(std::string_view s) {
  if (s.empty()) return 0;
  if (s == "Z" || s == "z") return 0;
  const int sign = s[0] == '+' ? 1 : (s[0] == '-' ? -1 : 0);
  if (sign == 0) return std::nullopt;
  int hh = 0, mm = 0;
  if (!digits(s, 1, 2, hh)) return std::nullopt;
  if (s.size() == 3) {
  } else if (s.size() == 5) {
    if (!digits(s, 3, 2, mm)) return std::nullopt;
  } else if (s.size() == 6 && s[3] == ':') {
    if (!digits(s, 4, 2, mm)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59) return std::nullopt;
  return sign * (hh * 3600 + mm * 60);
}

std::optional<std::int64_t> parse_time_of_day(std::string_view s) {
  int hh = 0, mm = 0, ss = 0;
  if (!digits(s, 0, 2, hh) || s.size() < 5 || s[2] != ':' || !digits(s, 3, 2, mm)) {
    return std::nullopt;
  }
  std::size_t pos = 5;
  if (pos < s.size() && s[pos] == ':') {
    if (!digits(s, pos + 1, 2, ss)) return std::nullopt;
    pos += 3;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      const std::size_t start = pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
      if (pos == start) return std::nullopt;
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  const auto offset = parse_offset(s.substr(pos));
  if (!offset) return std::nullopt;
  return static_cast<std::int64_t>(hh) * 3600 + mm * 60 + ss - *offset;
}

std::optional<std::int64_t> parse_epoch_integer(std::string_view s) {
  std::size_t pos = 0;
  bool neg = false;
  if (!s.empty() && s[0] == '-') {
    neg = true;
    pos = 1;
  }
  if (pos == s.size() || s.size() - pos > 12) return std::nullopt;
  std::int64_t v = 0;
  for (; pos < s.size(); ++pos) {
    if (s[pos] < '0' || s[pos] > '9') return std::nullopt;
    v = v * 10 + (s[pos] - '0');
  }
  return neg ? -v : v;
}

}  // namespace

std::optional<std::int64_t> parse_timestamp(std::string_view text, bool allow_bare_integers) {
  const auto s = trim(text);
  if (s.empty()) return std::nullopt;
  int y = 0, m = 0, d = 0;
  const bool has_year = s.size() >= 4 && digits(s, 0, 4, y);
  if (has_year && s.size() == 4) {
    if (!allow_bare_integers) return std::nullopt;
    return civil(y, 1, 1);
  }
  if (has_year && s.size() >= 7 && s[4] == '-' && digits(s, 5, 2, m)) {
    if (s.size() == 7) return civil(y, m, 1);
    if (s.size() >= 10 && s[7] == '-' && digits(s, 8, 2, d)) {
      const auto date = civil(y, m, d);
      if (!date) return std::nullopt;
      if (s.size() == 10) return date;
      if (s[10] != 'T' && s[10] != 't' && s[10] != ' ') return std::nullopt;
      const auto tod = parse_time_of_day(s.substr(11));
      if (!tod) return std::nullopt;
      return *date + *tod;
    }
    return std::nullopt;
  }
  if (allow_bare_integers) return parse_epoch_integer(s);
  return std::nullopt;
}

bool name_suggests_time(std::string_view column_name) {
  const auto n = to_lower(column_name);
  for (const char* hint : {"time", "date", "epoch", "year"}) {
    if (n.find(hint) != std::string::npos) return true;
  }
  return false;
}

std::string format_iso8601(std::int64_t t) {
  const std::int64_t days = floor_div(t, kDay);
  const std::int64_t secs = t - days * kDay;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(secs / 3600), static_cast<int>((secs % 3600) / 60),
                static_cast<int>(secs % 60));
  return buf;
}

std::int64_t epoch_from_civil(int y, unsigned m, unsigned d) {
  const year_month_day ymd{year{y}, month{m}, day{d}};
  return static_cast<std::int64_t>(sys_days{ymd}.time_since_epoch().count()) * kDay;
}

std::int64_t truncate_to(std::int64_t t, Resolution r) {
  switch (r) {
    case Resolution::Second: return t;
    case Resolution::Minute: return floor_div(t, 60) * 60;
    case Resolution::Hour: return floor_div(t, 3600) * 3600;
    case Resolution::Day: return floor_div(t, kDay) * kDay;
    case Resolution::Week: {
      const std::int64_t days = floor_div(t, kDay);
      // 1970-01-01 was a Thursday; shift so that Monday is day 0 of a week
      const std::int64_t monday = days - ((days + 3) % 7 + 7) % 7;
      return monday * kDay;
    }
    case Resolution::Month:
    case Resolution::Quarter:
    case Resolution::Year: {
      const year_month_day ymd{sys_days{std::chrono::days{floor_div(t, kDay)}}};
      unsigned mo = static_cast<unsigned>(ymd.month());
      if (r == Resolution::Quarter) mo = (mo - 1) / 3 * 3 + 1;
      if (r == Resolution::Year) mo = 1;
      return epoch_from_civil(static_cast<int>(ymd.year()), mo, 1);
    }
  }
  return t;
}

}  // namespace dse
