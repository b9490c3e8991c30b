#include "acop/calendar.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace acop {

namespace {

int parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len) {
    int value = 0;
    auto first = text.data() + pos;
    auto last = first + len;
    for (auto p = first; p != last; ++p) {
        if (*p < '0' || *p > '9') {
            throw std::invalid_argument("malformed date '" + std::string(text) + "'");
        }
    }
    std::from_chars(first, last, value);
    return value;
}

}  // namespace

std::string YearMonth::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
    return buf;
}

YearMonth YearMonth::from_index(int index) noexcept {
    int year = index >= 0 ? index / 12 : -((-index + 11) / 12);
    int month0 = index - year * 12;
    return {year, static_cast<unsigned>(month0 + 1)};
}

YearMonth year_month_of(Date d) noexcept {
    std::chrono::year_month_day ymd{d};
    return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month())};
}

Date first_day(YearMonth ym) noexcept {
    return std::chrono::sys_days{std::chrono::year{ym.year} / std::chrono::month{ym.month} / 1};
}

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        throw std::invalid_argument("malformed date '" + std::string(text) + "', expected YYYY-MM-DD");
    }
    const int y = parse_fixed_int(text, 0, 4);
    const int m = parse_fixed_int(text, 5, 2);
    const int d = parse_fixed_int(text, 8, 2);
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw std::invalid_argument("invalid calendar date '" + std::string(text) + "'");
    }
    return std::chrono::sys_days{ymd};
}

std::string format_date(Date d) {
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

YearMonth parse_year_month(std::string_view text) {
    if (text.size() != 7 || text[4] != '-') {
        throw std::invalid_argument("malformed month key '" + std::string(text) + "', expected YYYY-MM");
    }
    const int y = parse_fixed_int(text, 0, 4);
    const int m = parse_fixed_int(text, 5, 2);
    if (m < 1 || m > 12) {
        throw std::invalid_argument("invalid month in '" + std::string(text) + "'");
    }
    return {y, static_cast<unsigned>(m)};
}

}  // namespace acop
