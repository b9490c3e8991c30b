#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string_view>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "acop/autocopula.hpp"
#include "acop/nig.hpp"
#include "acop/seasonal_delta.hpp"
#include "acop/simulator.hpp"

namespace acop {

using Json = nlohmann::ordered_json;

struct Provenance {
    std::string input_sha256;
    std::string config_sha256;
    std::string version = ACOP_VERSION;
    std::uint64_t seed = 0;

    /// "# acop <version> input_sha256=... config_sha256=... seed=..."
    [[nodiscard]] std::string header_line() const;
    friend bool operator==(const Provenance&, const Provenance&) = default;
};

Json to_json(const Provenance& p);
Provenance provenance_from_json(const Json& j);

/// {"mu", "alpha", "beta", "delta"}; gamma is not stored.
Json to_json(const NigParams& p);
NigParams nig_params_from_json(const Json& j);

/// {"months": [{"month": "YYYY-MM", "delta": ...}, ...]}
Json to_json(const MonthlyDeltaSeries& s);
MonthlyDeltaSeries monthly_delta_from_json(const Json& j);

Json to_json(const NuArModel& m);
NuArModel nu_ar_from_json(const Json& j);

inline constexpr int kCopulaFormatVersion = 1;

/// Rectangles plus the margin knot tables. Loading rebuilds the copula from
/// the rectangles and checks the stored knots against the rebuilt ones.
Json to_json(const EmpiricalAutocopula& c);
EmpiricalAutocopula copula_from_json(const Json& j);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Writes {"provenance": ..., <members of body>} with two-space indentation.
void write_json_file(const std::filesystem::path& path, const Provenance& prov, const Json& body);
/// Reads a JSON file; throws DataError when missing or malformed.
Json read_json_file(const std::filesystem::path& path);

/// CSV with the provenance header line, then `header`, then rows.
class CsvWriter {
public:
    /// Throws DataError if the file cannot be created.
    CsvWriter(const std::filesystem::path& path, const Provenance& prov, const std::vector<std::string>& header);
    CsvWriter& cell(double v);
    CsvWriter& cell(std::string_view s);
    CsvWriter& cell(std::int64_t v);
    void end_row();
    /// Flushes and checks the stream; throws DataError on failure.
    void close();

private:
    void separator();

    std::filesystem::path path_;
    std::ofstream out_;
    bool row_empty_ = true;
};

void write_delta_fan_csv(const std::filesystem::path& path, const Provenance& prov, const DeltaFan& fan);
void write_monthly_delta_csv(const std::filesystem::path& path, const Provenance& prov, const MonthlyDeltaSeries& s);
void write_tail_curves_csv(const std::filesystem::path& path, const Provenance& prov, const TailCurves& curves);
void write_tail_bands_csv(const std::filesystem::path& path, const Provenance& prov, const TailBands& bands,
                          const TailCurves* data_curves);
void write_percentiles_csv(const std::filesystem::path& path, const Provenance& prov, const MonthlyPercentiles& p);
void write_ensemble_csv(const std::filesystem::path& path, const Provenance& prov, const SimulationEnsemble& e);

/// Binary ensemble, little-endian:
///   8 bytes  magic "ACOPENS1"
///   u32      provenance header length L, then L bytes of header_line()
///   u64      path count P
///   u64      horizon H
///   i64      first date as days since 1970-01-01
///   P*H f64  values, row-major by path
void write_ensemble_binary(const std::filesystem::path& path, const Provenance& prov, const SimulationEnsemble& e);
SimulationEnsemble read_ensemble_binary(const std::filesystem::path& path, std::string* provenance_line = nullptr);

}  // namespace acop
