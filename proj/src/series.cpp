#include "acop/series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>

#include "acop/error.hpp"

namespace acop {

ObservationSeries::ObservationSeries(std::vector<Observation> records) : records_(std::move(records)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if (!std::isfinite(records_[i].value)) {
            throw DataError("non-finite value at " + format_date(records_[i].date));
        }
        if (i > 0 && !(records_[i - 1].date < records_[i].date)) {
            throw DataError("dates must be strictly increasing: " + format_date(records_[i - 1].date) + " then " +
                            format_date(records_[i].date));
        }
    }
}

std::vector<double> ObservationSeries::values() const {
    std::vector<double> v;
    v.reserve(records_.size());
    for (const auto& r : records_) v.push_back(r.value);
    return v;
}

std::vector<Date> ObservationSeries::dates() const {
    std::vector<Date> d;
    d.reserve(records_.size());
    for (const auto& r : records_) d.push_back(r.date);
    return d;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace

ObservationSeries parse_csv(std::istream& in, const CsvColumns& columns, std::string_view source) {
    const std::string src(source);
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> date_col;
    std::optional<std::size_t> value_col;
    std::size_t header_fields = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = split_fields(t);
        header_fields = fields.size();
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (fields[i] == columns.date) date_col = i;
            if (fields[i] == columns.value) value_col = i;
        }
        break;
    }
    if (header_fields == 0) throw DataError(src + ": empty file (no header)");
    if (!date_col || !value_col) {
        throw DataError(src + ": header must contain columns '" + columns.date + "' and '" + columns.value + "'");
    }

    std::vector<Observation> records;
    std::vector<std::size_t> bad_lines;
    std::vector<std::size_t> record_lines;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto fields = split_fields(t);
        if (fields.size() <= std::max(*date_col, *value_col)) {
            bad_lines.push_back(line_no);
            continue;
        }
        const auto value = parse_double(fields[*value_col]);
        Date date;
        try {
            date = parse_date(fields[*date_col]);
        } catch (const std::invalid_argument&) {
            bad_lines.push_back(line_no);
            continue;
        }
        if (!value) {
            bad_lines.push_back(line_no);
            continue;
        }
        if (!records.empty()) {
            if (records.back().date == date) {
                throw DataError(src + ":" + std::to_string(line_no) + ": duplicate date " + format_date(date) +
                                " (first seen on line " + std::to_string(record_lines.back()) + ")");
            }
            if (date < records.back().date) {
                throw DataError(src + ":" + std::to_string(line_no) + ": date " + format_date(date) +
                                " precedes " + format_date(records.back().date) + " (dates must increase)");
            }
        }
        records.push_back({date, *value});
        record_lines.push_back(line_no);
    }
    if (!bad_lines.empty()) {
        std::string msg = src + ": unparseable rows at line(s)";
        for (std::size_t i = 0; i < bad_lines.size() && i < 20; ++i) msg += " " + std::to_string(bad_lines[i]);
        if (bad_lines.size() > 20) msg += " ... (" + std::to_string(bad_lines.size()) + " total)";
        throw DataError(msg);
    }
    if (records.empty()) throw DataError(src + ": series is empty (header only)");
    return ObservationSeries(std::move(records));
}

ObservationSeries ingest_csv(const std::filesystem::path& path, const CsvColumns& columns) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path.string() + "'");
    return parse_csv(in, columns, path.string());
}

}  // namespace acop
