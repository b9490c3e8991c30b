#include "acop/serialize.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "acop/error.hpp"

namespace acop {

static_assert(std::endian::native == std::endian::little, "binary ensemble layout assumes little-endian hosts");

std::string Provenance::header_line() const {
    return "# acop " + version + " input_sha256=" + input_sha256 + " config_sha256=" + config_sha256 +
           " seed=" + std::to_string(seed);
}

Json to_json(const Provenance& p) {
    Json j;
    j["version"] = p.version;
    j["input_sha256"] = p.input_sha256;
    j["config_sha256"] = p.config_sha256;
    j["seed"] = p.seed;
    return j;
}

namespace {

template <class T>
T get(const Json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key)) throw DataError(std::string(what) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string(what) + ": bad field '" + key + "': " + e.what());
    }
}

template <class F>
auto rethrow_invalid(const char* what, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

Provenance provenance_from_json(const Json& j) {
    Provenance p;
    p.version = get<std::string>(j, "version", "provenance");
    p.input_sha256 = get<std::string>(j, "input_sha256", "provenance");
    p.config_sha256 = get<std::string>(j, "config_sha256", "provenance");
    p.seed = get<std::uint64_t>(j, "seed", "provenance");
    return p;
}

Json to_json(const NigParams& p) {
    Json j;
    j["mu"] = p.mu();
    j["alpha"] = p.alpha();
    j["beta"] = p.beta();
    j["delta"] = p.delta();
    return j;
}

NigParams nig_params_from_json(const Json& j) {
    const char* what = "NIG parameters";
    return rethrow_invalid(what, [&] {
        return NigParams(get<double>(j, "mu", what), get<double>(j, "alpha", what), get<double>(j, "beta", what),
                         get<double>(j, "delta", what));
    });
}

Json to_json(const MonthlyDeltaSeries& s) {
    Json months = Json::array();
    for (const auto& e : s.entries()) {
        Json m;
        m["month"] = e.month.str();
        m["delta"] = e.delta;
        months.push_back(std::move(m));
    }
    Json j;
    j["months"] = std::move(months);
    return j;
}

MonthlyDeltaSeries monthly_delta_from_json(const Json& j) {
    const char* what = "monthly deltas";
    const auto months = get<Json>(j, "months", what);
    if (!months.is_array()) throw DataError("monthly deltas: 'months' must be an array");
    std::vector<MonthlyDelta> entries;
    for (const auto& m : months) {
        const auto key = get<std::string>(m, "month", what);
        YearMonth ym;
        try {
            ym = parse_year_month(key);
        } catch (const std::invalid_argument& e) {
            throw DataError(std::string("monthly deltas: ") + e.what());
        }
        entries.push_back({ym, get<double>(m, "delta", what)});
    }
    return rethrow_invalid(what, [&] { return MonthlyDeltaSeries(std::move(entries)); });
}

Json to_json(const NuArModel& m) {
    Json j;
    j["a"] = m.a;
    j["harmonic_periods"] = kHarmonicPeriods;
    j["mean_coeffs"] = m.mean_coeffs;
    j["variance_coeffs"] = m.variance_coeffs;
    j["sigma_floor"] = m.sigma_floor;
    return j;
}

NuArModel nu_ar_from_json(const Json& j) {
    const char* what = "nu AR model";
    NuArModel m;
    m.a = get<double>(j, "a", what);
    const auto periods = get<std::vector<double>>(j, "harmonic_periods", what);
    if (periods != std::vector<double>(kHarmonicPeriods.begin(), kHarmonicPeriods.end())) {
        throw DataError("nu AR model: unsupported harmonic periods");
    }
    const auto mean = get<std::vector<double>>(j, "mean_coeffs", what);
    const auto var = get<std::vector<double>>(j, "variance_coeffs", what);
    if (mean.size() != kHarmonicBasisSize || var.size() != kHarmonicBasisSize) {
        throw DataError("nu AR model: expected " + std::to_string(kHarmonicBasisSize) + " coefficients per harmonic set");
    }
    std::copy(mean.begin(), mean.end(), m.mean_coeffs.begin());
    std::copy(var.begin(), var.end(), m.variance_coeffs.begin());
    m.sigma_floor = get<double>(j, "sigma_floor", what);
    rethrow_invalid(what, [&] {
        m.validate();
        return 0;
    });
    return m;
}

Json to_json(const EmpiricalAutocopula& c) {
    Json rects = Json::array();
    for (const auto& r : c.partition().rects()) {
        rects.push_back(Json::array({r.u1_lo, r.u1_hi, r.u2_lo, r.u2_hi, r.count}));
    }
    Json j;
    j["version"] = kCopulaFormatVersion;
    j["total_count"] = c.partition().total_count();
    j["rectangles"] = std::move(rects);
    j["x_edges"] = c.x_edges();
    j["phi1_knots"] = c.p1_knots();
    j["y_edges"] = c.y_edges();
    j["phi2_knots"] = c.p2_knots();
    return j;
}

EmpiricalAutocopula copula_from_json(const Json& j) {
    const char* what = "copula";
    if (get<int>(j, "version", what) != kCopulaFormatVersion) throw DataError("copula: unsupported format version");
    const auto total = get<std::size_t>(j, "total_count", what);
    const auto rects_json = get<Json>(j, "rectangles", what);
    std::vector<Rect> rects;
    for (const auto& r : rects_json) {
        if (!r.is_array() || r.size() != 5) throw DataError("copula: rectangle must be [u1_lo,u1_hi,u2_lo,u2_hi,count]");
        try {
            rects.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>(),
                             r[4].get<std::size_t>()});
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("copula: bad rectangle: ") + e.what());
        }
    }
    auto partition = rethrow_invalid(what, [&] { return RectPartition(std::move(rects), total); });
    EmpiricalAutocopula c(std::move(partition));
    auto same = [](std::span<const double> a, const std::vector<double>& b) {
        return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
    };
    if (!same(c.x_edges(), get<std::vector<double>>(j, "x_edges", what)) ||
        !same(c.p1_knots(), get<std::vector<double>>(j, "phi1_knots", what)) ||
        !same(c.y_edges(), get<std::vector<double>>(j, "y_edges", what)) ||
        !same(c.p2_knots(), get<std::vector<double>>(j, "phi2_knots", what))) {
        throw DataError("copula: stored margin knots do not match the rectangles");
    }
    return c;
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_json_file(const std::filesystem::path& path, const Provenance& prov, const Json& body) {
    Json j;
    j["provenance"] = to_json(prov);
    for (const auto& [k, v] : body.items()) j[k] = v;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw DataError("failed writing " + path.string());
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// CSV

CsvWriter::CsvWriter(const std::filesystem::path& path, const Provenance& prov, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw DataError("cannot write " + path.string());
    out_ << prov.header_line() << '\n';
    for (const auto& h : header) cell(std::string_view(h));
    end_row();
}

void CsvWriter::separator() {
    if (!row_empty_) out_ << ',';
    row_empty_ = false;
}

CsvWriter& CsvWriter::cell(double v) {
    separator();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view s) {
    separator();
    out_ << s;
    return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t v) {
    separator();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_empty_ = true;
}

void CsvWriter::close() {
    out_.close();
    if (!out_) throw DataError("failed writing " + path_.string());
}

void write_delta_fan_csv(const std::filesystem::path& path, const Provenance& prov, const DeltaFan& fan) {
    CsvWriter w(path, prov, {"year", "month", "level", "value"});
    for (std::size_t m = 0; m < fan.months.size(); ++m) {
        for (std::size_t l = 0; l < fan.levels.size(); ++l) {
            w.cell(std::int64_t{fan.months[m].year}).cell(std::int64_t{fan.months[m].month}).cell(fan.levels[l]);
            w.cell(fan.value(m, l));
            w.end_row();
        }
    }
    w.close();
}

void write_monthly_delta_csv(const std::filesystem::path& path, const Provenance& prov, const MonthlyDeltaSeries& s) {
    CsvWriter w(path, prov, {"year", "month", "delta"});
    for (const auto& e : s.entries()) {
        w.cell(std::int64_t{e.month.year}).cell(std::int64_t{e.month.month}).cell(e.delta);
        w.end_row();
    }
    w.close();
}

void write_tail_curves_csv(const std::filesystem::path& path, const Provenance& prov, const TailCurves& curves) {
    CsvWriter w(path, prov, {"u", "lower", "upper"});
    for (std::size_t k = 0; k < curves.grid.size(); ++k) {
        w.cell(curves.grid[k]).cell(curves.lower[k]).cell(curves.upper[k]);
        w.end_row();
    }
    w.close();
}

void write_tail_bands_csv(const std::filesystem::path& path, const Provenance& prov, const TailBands& bands,
                          const TailCurves* data_curves) {
    std::vector<std::string> header{"u", "lower_p05", "lower_p50", "lower_p95", "upper_p05", "upper_p50", "upper_p95"};
    if (data_curves) {
        header.emplace_back("data_lower");
        header.emplace_back("data_upper");
    }
    CsvWriter w(path, prov, header);
    for (std::size_t k = 0; k < bands.grid.size(); ++k) {
        w.cell(bands.grid[k]).cell(bands.lower_lo[k]).cell(bands.lower_mid[k]).cell(bands.lower_hi[k]);
        w.cell(bands.upper_lo[k]).cell(bands.upper_mid[k]).cell(bands.upper_hi[k]);
        if (data_curves) w.cell(data_curves->lower[k]).cell(data_curves->upper[k]);
        w.end_row();
    }
    w.close();
}

void write_percentiles_csv(const std::filesystem::path& path, const Provenance& prov, const MonthlyPercentiles& p) {
    CsvWriter w(path, prov, {"year", "month", "level", "value"});
    for (std::size_t m = 0; m < p.months.size(); ++m) {
        for (std::size_t l = 0; l < p.levels.size(); ++l) {
            w.cell(std::int64_t{p.months[m].year}).cell(std::int64_t{p.months[m].month}).cell(p.levels[l]);
            w.cell(p.value(m, l));
            w.end_row();
        }
    }
    w.close();
}

void write_ensemble_csv(const std::filesystem::path& path, const Provenance& prov, const SimulationEnsemble& e) {
    CsvWriter w(path, prov, {"path", "date", "value"});
    std::vector<std::string> dates;
    dates.reserve(e.dates.size());
    for (const auto& d : e.dates) dates.push_back(format_date(d));
    for (std::size_t p = 0; p < e.path_count; ++p) {
        const auto path_values = e.path(p);
        for (std::size_t t = 0; t < e.horizon(); ++t) {
            w.cell(static_cast<std::int64_t>(p)).cell(std::string_view(dates[t])).cell(path_values[t]);
            w.end_row();
        }
    }
    w.close();
}

namespace {

constexpr std::array<char, 8> kEnsembleMagic{'A', 'C', 'O', 'P', 'E', 'N', 'S', '1'};

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T take(std::istream& in, const std::filesystem::path& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw DataError("truncated ensemble file " + path.string());
    return v;
}

}  // namespace

void write_ensemble_binary(const std::filesystem::path& path, const Provenance& prov, const SimulationEnsemble& e) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(kEnsembleMagic.data(), kEnsembleMagic.size());
    const auto line = prov.header_line();
    put(out, static_cast<std::uint32_t>(line.size()));
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    put(out, static_cast<std::uint64_t>(e.path_count));
    put(out, static_cast<std::uint64_t>(e.horizon()));
    const std::int64_t first = e.dates.empty() ? 0 : e.dates.front().time_since_epoch().count();
    put(out, first);
    out.write(reinterpret_cast<const char*>(e.values.data()), static_cast<std::streamsize>(e.values.size() * sizeof(double)));
    if (!out) throw DataError("failed writing " + path.string());
}

SimulationEnsemble read_ensemble_binary(const std::filesystem::path& path, std::string* provenance_line) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kEnsembleMagic) throw DataError("not an ensemble file: " + path.string());
    const auto len = take<std::uint32_t>(in, path);
    std::string line(len, '\0');
    in.read(line.data(), len);
    if (!in) throw DataError("truncated ensemble file " + path.string());
    if (provenance_line) *provenance_line = line;
    SimulationEnsemble e;
    e.path_count = take<std::uint64_t>(in, path);
    const auto horizon = take<std::uint64_t>(in, path);
    const auto first = take<std::int64_t>(in, path);
    e.dates = consecutive_dates(Date{std::chrono::days{first}}, horizon);
    e.values.resize(e.path_count * horizon);
    in.read(reinterpret_cast<char*>(e.values.data()), static_cast<std::streamsize>(e.values.size() * sizeof(double)));
    if (!in) throw DataError("truncated ensemble file " + path.string());
    return e;
}

}  // namespace acop
