#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acop/calendar.hpp"

namespace acop {

struct Observation {
    Date date;
    double value;
};

/// Daily observations with strictly increasing dates and finite values.
/// Gaps are allowed.
class ObservationSeries {
public:
    ObservationSeries() = default;
    /// Throws DataError if dates are not strictly increasing or a value is
    /// not finite.
    explicit ObservationSeries(std::vector<Observation> records);

    [[nodiscard]] std::span<const Observation> records() const noexcept { return records_; }
    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
    [[nodiscard]] const Observation& operator[](std::size_t i) const { return records_[i]; }
    [[nodiscard]] std::vector<double> values() const;
    [[nodiscard]] std::vector<Date> dates() const;

private:
    std::vector<Observation> records_;
};

struct CsvColumns {
    std::string date = "date";
    std::string value = "value";
};

/// Reads a headed CSV. Lines starting with '#' are ignored. Throws DataError
/// for a missing file, missing columns, an empty body, unparseable rows
/// (reported with line numbers), duplicate or decreasing dates.
ObservationSeries ingest_csv(const std::filesystem::path& path, const CsvColumns& columns = {});
ObservationSeries parse_csv(std::istream& in, const CsvColumns& columns = {}, std::string_view source = "<stream>");

}  // namespace acop
