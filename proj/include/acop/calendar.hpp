#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace acop {

using Date = std::chrono::sys_days;

/// Calendar month key. `index()` counts months from January of year 0, so
/// `index() % 12 == month - 1` and harmonic terms phase-lock to the calendar.
struct YearMonth {
    int year = 1970;
    unsigned month = 1;  // 1..12

    [[nodiscard]] int index() const noexcept { return year * 12 + static_cast<int>(month) - 1; }
    [[nodiscard]] YearMonth next() const noexcept { return from_index(index() + 1); }
    [[nodiscard]] std::string str() const;  // YYYY-MM

    static YearMonth from_index(int index) noexcept;

    friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

[[nodiscard]] YearMonth year_month_of(Date d) noexcept;
[[nodiscard]] Date first_day(YearMonth ym) noexcept;

/// Strict ISO-8601 calendar date, YYYY-MM-DD. Throws std::invalid_argument.
[[nodiscard]] Date parse_date(std::string_view text);
[[nodiscard]] std::string format_date(Date d);

/// YYYY-MM. Throws std::invalid_argument.
[[nodiscard]] YearMonth parse_year_month(std::string_view text);

}  // namespace acop
