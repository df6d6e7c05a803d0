#pragma once

#include <chrono>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "biaslens/error.hpp"

namespace biaslens {

/// Calendar date (UTC, day precision). Thin wrapper over std::chrono's
/// civil-calendar types so arithmetic and weekday math come from the stdlib.
class Date {
 public:
  Date() : ymd_(std::chrono::year{1970} / 1 / 1) {}
  explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}
  Date(int y, unsigned m, unsigned d)
      : ymd_(std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}) {}

  static std::optional<Date> parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    if (std::sscanf(std::string(text).c_str(), "%d-%u-%u", &y, &m, &d) != 3)
      return std::nullopt;
    Date date(y, m, d);
    if (!date.ymd_.ok()) return std::nullopt;
    return date;
  }

  /// Parses "YYYY-MM-DD"; throws MalformedRecord otherwise.
  static Date parse_or_throw(std::string_view text) {
    auto d = parse(text);
    if (!d) throw Error(ErrorCode::MalformedRecord, "bad date: " + std::string(text));
    return *d;
  }

  std::string to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd_.year()),
                  unsigned(ymd_.month()), unsigned(ymd_.day()));
    return buf;
  }

  std::chrono::sys_days to_days() const { return std::chrono::sys_days{ymd_}; }

  /// Monday of this date's ISO week.
  Date week_monday() const {
    auto sd = to_days();
    std::chrono::weekday wd{sd};
    return Date(std::chrono::year_month_day{sd - (wd - std::chrono::Monday)});
  }

  /// First day of this date's month.
  Date month_start() const {
    return Date(ymd_.year() / ymd_.month() / std::chrono::day{1});
  }

  Date plus_days(int n) const {
    return Date(std::chrono::year_month_day{to_days() + std::chrono::days{n}});
  }

  int year() const { return int(ymd_.year()); }
  unsigned month() const { return unsigned(ymd_.month()); }
  unsigned day() const { return unsigned(ymd_.day()); }

  friend auto operator<=>(const Date& a, const Date& b) {
    return a.to_days() <=> b.to_days();
  }
  friend bool operator==(const Date& a, const Date& b) {
    return a.to_days() == b.to_days();
  }

 private:
  std::chrono::year_month_day ymd_;
};

}  // namespace biaslens
