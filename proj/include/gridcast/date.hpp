#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace gridcast {

/// Proleptic Gregorian calendar date. All joins and splits operate on dates;
/// there is no timezone handling at daily granularity.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  /// Days since 1970-01-01 (negative before the epoch).
  [[nodiscard]] std::int64_t serial() const;

  static Date from_serial(std::int64_t days);

  /// 1-based ordinal day within the year.
  [[nodiscard]] int day_of_year() const;

  [[nodiscard]] bool valid() const;

  /// "YYYY-MM-DD"
  [[nodiscard]] std::string to_string() const;

  /// Parses "YYYY-MM-DD". Returns false on malformed or out-of-range input.
  static bool parse(std::string_view text, Date& out);

  friend auto operator<=>(const Date& a, const Date& b) {
    return a.serial() <=> b.serial();
  }
  friend bool operator==(const Date& a, const Date& b) {
    return a.year == b.year && a.month == b.month && a.day == b.day;
  }
};

/// Adds `days` calendar days.
Date operator+(const Date& d, std::int64_t days);

}  // namespace gridcast
