#include "acop/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "acop/digest.hpp"
#include "acop/error.hpp"
#include "acop/marginal.hpp"

namespace acop {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

namespace {

void check_keys(const Json& obj, const char* section, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string("config section '") + section + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError(std::string("unknown config key '") + section + "." + key + "'");
        }
    }
}

template <class T>
void read(const Json& obj, const char* section, const char* key, T& out) {
    if (!obj.contains(key)) return;
    const Json& v = obj.at(key);
    if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        // nlohmann converts -1 to a huge unsigned value; refuse it instead.
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            throw ConfigError(std::string("config key '") + section + "." + key + "' must be a non-negative integer");
        }
    }
    try {
        out = v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("config key '") + section + "." + key + "' has the wrong type");
    }
}

template <class T>
void read_optional(const Json& obj, const char* section, const char* key, std::optional<T>& out) {
    if (!obj.contains(key) || obj.at(key).is_null()) return;
    T v{};
    read(obj, section, key, v);
    out = v;
}

ConditioningMode parse_conditioning(const std::string& s) {
    if (s == "cumulative") return ConditioningMode::cumulative;
    if (s == "partial") return ConditioningMode::partial;
    throw ConfigError("copula.conditioning must be 'cumulative' or 'partial', got '" + s + "'");
}

std::string conditioning_name(ConditioningMode m) { return m == ConditioningMode::partial ? "partial" : "cumulative"; }

DeltaMode parse_delta_mode(const std::string& s) {
    if (s == "frozen") return DeltaMode::frozen;
    if (s == "simulated") return DeltaMode::simulated;
    throw ConfigError("simulate.delta_mode must be 'frozen' or 'simulated', got '" + s + "'");
}

std::string delta_mode_name(DeltaMode m) { return m == DeltaMode::simulated ? "simulated" : "frozen"; }

EnsembleFormat parse_format(const std::string& s) {
    if (s == "none") return EnsembleFormat::none;
    if (s == "csv") return EnsembleFormat::csv;
    if (s == "binary") return EnsembleFormat::binary;
    throw ConfigError("simulate.ensemble_format must be 'none', 'csv' or 'binary', got '" + s + "'");
}

std::string format_name(EnsembleFormat f) {
    switch (f) {
        case EnsembleFormat::csv: return "csv";
        case EnsembleFormat::binary: return "binary";
        default: return "none";
    }
}

void check_levels(const std::vector<double>& levels, const char* key) {
    for (double l : levels)
        if (!(l >= 0.0 && l <= 1.0)) throw ConfigError(std::string(key) + " values must lie in [0,1]");
}

}  // namespace

fs::path PipelineConfig::data_path() const {
    const fs::path p(data.path);
    return p.is_absolute() ? p : base_dir / p;
}

std::vector<double> PipelineConfig::tail_grid() const {
    return probability_grid(simulate.tail_grid_start, simulate.tail_grid_stop, simulate.tail_grid_step);
}

PipelineConfig parse_config(const Json& j, const fs::path& base_dir) {
    PipelineConfig cfg;
    cfg.base_dir = base_dir;
    check_keys(j, "<root>", {"data", "marginal", "seasonal", "copula", "simulate", "output"});

    if (j.contains("data")) {
        const auto& d = j["data"];
        check_keys(d, "data", {"path", "date_column", "value_column"});
        read(d, "data", "path", cfg.data.path);
        read(d, "data", "date_column", cfg.data.columns.date);
        read(d, "data", "value_column", cfg.data.columns.value);
    }
    if (j.contains("marginal")) {
        const auto& m = j["marginal"];
        check_keys(m, "marginal", {"tolerance", "max_iterations", "max_restarts"});
        read(m, "marginal", "tolerance", cfg.marginal.optimizer.f_tolerance);
        read(m, "marginal", "max_iterations", cfg.marginal.optimizer.max_iterations);
        read(m, "marginal", "max_restarts", cfg.marginal.optimizer.max_restarts);
        if (!(cfg.marginal.optimizer.f_tolerance > 0.0)) throw ConfigError("marginal.tolerance must be > 0");
        if (cfg.marginal.optimizer.max_iterations == 0) throw ConfigError("marginal.max_iterations must be >= 1");
    }
    if (j.contains("seasonal")) {
        const auto& s = j["seasonal"];
        check_keys(s, "seasonal",
                   {"min_observations_per_month", "min_months", "sigma_floor_fraction", "fan_paths",
                    "fan_horizon_months", "fan_levels"});
        read(s, "seasonal", "min_observations_per_month", cfg.seasonal.min_observations);
        read(s, "seasonal", "min_months", cfg.seasonal.min_months);
        read(s, "seasonal", "sigma_floor_fraction", cfg.seasonal.sigma_floor_fraction);
        read(s, "seasonal", "fan_paths", cfg.seasonal.fan_paths);
        read(s, "seasonal", "fan_horizon_months", cfg.seasonal.fan_horizon_months);
        read(s, "seasonal", "fan_levels", cfg.seasonal.fan_levels);
        if (!(cfg.seasonal.sigma_floor_fraction > 0.0)) throw ConfigError("seasonal.sigma_floor_fraction must be > 0");
        if (cfg.seasonal.min_observations < 1) throw ConfigError("seasonal.min_observations_per_month must be >= 1");
        check_levels(cfg.seasonal.fan_levels, "seasonal.fan_levels");
    }
    if (j.contains("copula")) {
        const auto& c = j["copula"];
        check_keys(c, "copula", {"target_per_rect", "conditioning"});
        read_optional(c, "copula", "target_per_rect", cfg.copula.target_per_rect);
        std::string mode = "cumulative";
        read(c, "copula", "conditioning", mode);
        cfg.copula.conditioning = parse_conditioning(mode);
        if (cfg.copula.target_per_rect && *cfg.copula.target_per_rect < 1) {
            throw ConfigError("copula.target_per_rect must be >= 1");
        }
    }
    if (j.contains("simulate")) {
        const auto& s = j["simulate"];
        check_keys(s, "simulate",
                   {"paths", "horizon_days", "start_date", "seed", "x0", "delta_mode", "levels", "tail_grid",
                    "ensemble_format", "threads"});
        read(s, "simulate", "paths", cfg.simulate.paths);
        read_optional(s, "simulate", "horizon_days", cfg.simulate.horizon_days);
        std::optional<std::string> start;
        read_optional(s, "simulate", "start_date", start);
        if (start) {
            try {
                cfg.simulate.start = parse_date(*start);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("simulate.start_date: ") + e.what());
            }
        }
        read(s, "simulate", "seed", cfg.simulate.seed);
        read_optional(s, "simulate", "x0", cfg.simulate.x0);
        std::string delta_mode = "frozen";
        read(s, "simulate", "delta_mode", delta_mode);
        cfg.simulate.delta_mode = parse_delta_mode(delta_mode);
        read(s, "simulate", "levels", cfg.simulate.levels);
        check_levels(cfg.simulate.levels, "simulate.levels");
        if (s.contains("tail_grid")) {
            const auto& g = s["tail_grid"];
            check_keys(g, "simulate.tail_grid", {"start", "stop", "step"});
            read(g, "simulate.tail_grid", "start", cfg.simulate.tail_grid_start);
            read(g, "simulate.tail_grid", "stop", cfg.simulate.tail_grid_stop);
            read(g, "simulate.tail_grid", "step", cfg.simulate.tail_grid_step);
            if (!(cfg.simulate.tail_grid_start > 0.0 && cfg.simulate.tail_grid_stop < 1.0 &&
                  cfg.simulate.tail_grid_step > 0.0 && cfg.simulate.tail_grid_start <= cfg.simulate.tail_grid_stop)) {
                throw ConfigError("simulate.tail_grid must satisfy 0 < start <= stop < 1 and step > 0");
            }
        }
        std::string format = "none";
        read(s, "simulate", "ensemble_format", format);
        cfg.simulate.ensemble_format = parse_format(format);
        read(s, "simulate", "threads", cfg.simulate.threads);
        if (cfg.simulate.horizon_days && *cfg.simulate.horizon_days < 1) {
            throw ConfigError("simulate.horizon_days must be >= 1");
        }
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        check_keys(o, "output", {"directory"});
        std::string dir;
        read(o, "output", "directory", dir);
        if (!dir.empty()) cfg.output_dir = fs::path(dir).is_absolute() ? fs::path(dir) : base_dir / dir;
    } else {
        cfg.output_dir = base_dir / "out";
    }
    return cfg;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
    auto base = path.parent_path();
    if (base.empty()) base = ".";
    return parse_config(j, base);
}

Json to_json(const PipelineConfig& cfg) {
    Json j;
    j["data"] = {{"path", cfg.data.path},
                 {"date_column", cfg.data.columns.date},
                 {"value_column", cfg.data.columns.value}};
    j["marginal"] = {{"tolerance", cfg.marginal.optimizer.f_tolerance},
                     {"max_iterations", cfg.marginal.optimizer.max_iterations},
                     {"max_restarts", cfg.marginal.optimizer.max_restarts}};
    j["seasonal"] = {{"min_observations_per_month", cfg.seasonal.min_observations},
                     {"min_months", cfg.seasonal.min_months},
                     {"sigma_floor_fraction", cfg.seasonal.sigma_floor_fraction},
                     {"fan_paths", cfg.seasonal.fan_paths},
                     {"fan_horizon_months", cfg.seasonal.fan_horizon_months},
                     {"fan_levels", cfg.seasonal.fan_levels}};
    Json copula;
    copula["target_per_rect"] = cfg.copula.target_per_rect ? Json(*cfg.copula.target_per_rect) : Json(nullptr);
    copula["conditioning"] = conditioning_name(cfg.copula.conditioning);
    j["copula"] = copula;
    Json sim;
    sim["paths"] = cfg.simulate.paths;
    sim["horizon_days"] = cfg.simulate.horizon_days ? Json(*cfg.simulate.horizon_days) : Json(nullptr);
    sim["start_date"] = cfg.simulate.start ? Json(format_date(*cfg.simulate.start)) : Json(nullptr);
    sim["seed"] = cfg.simulate.seed;
    sim["x0"] = cfg.simulate.x0 ? Json(*cfg.simulate.x0) : Json(nullptr);
    sim["delta_mode"] = delta_mode_name(cfg.simulate.delta_mode);
    sim["levels"] = cfg.simulate.levels;
    sim["tail_grid"] = {{"start", cfg.simulate.tail_grid_start},
                        {"stop", cfg.simulate.tail_grid_stop},
                        {"step", cfg.simulate.tail_grid_step}};
    sim["ensemble_format"] = format_name(cfg.simulate.ensemble_format);
    j["simulate"] = sim;
    // Thread count and output location do not affect results and are left out.
    return j;
}

// ---------------------------------------------------------------------------
// Bundle

void ModelBundle::require(bool need_marginal, bool need_seasonal, bool need_copula) const {
    if (need_marginal && !marginal) throw DataError(std::string("model bundle lacks ") + kMarginalFile);
    if (need_seasonal && !monthly_delta) throw DataError(std::string("model bundle lacks ") + kMonthlyDeltaFile);
    if (need_seasonal && !nu_ar) throw DataError(std::string("model bundle lacks ") + kNuArFile);
    if (need_copula && !copula) throw DataError(std::string("model bundle lacks ") + kCopulaFile);
}

void write_bundle(const fs::path& dir, const ModelBundle& b) {
    fs::create_directories(dir);
    const auto& prov = b.provenance;
    if (b.marginal) {
        Json j;
        j["params"] = to_json(*b.marginal);
        if (b.log_likelihood) j["log_likelihood"] = *b.log_likelihood;
        if (b.moment_matching) j["moment_matching"] = to_json(*b.moment_matching);
        write_json_file(dir / kMarginalFile, prov, j);
    }
    if (b.monthly_delta) write_json_file(dir / kMonthlyDeltaFile, prov, to_json(*b.monthly_delta));
    if (b.nu_ar) write_json_file(dir / kNuArFile, prov, to_json(*b.nu_ar));
    if (b.copula) write_json_file(dir / kCopulaFile, prov, to_json(*b.copula));
    write_json_file(dir / kProvenanceFile, prov, Json::object());
}

ModelBundle load_bundle(const fs::path& dir) {
    ModelBundle b;
    if (fs::exists(dir / kProvenanceFile)) {
        b.provenance = provenance_from_json(read_json_file(dir / kProvenanceFile).at("provenance"));
    }
    if (fs::exists(dir / kMarginalFile)) {
        const auto j = read_json_file(dir / kMarginalFile);
        if (!j.contains("params")) throw DataError("marginal.json lacks 'params'");
        b.marginal = nig_params_from_json(j["params"]);
        if (j.contains("moment_matching")) b.moment_matching = nig_params_from_json(j["moment_matching"]);
        if (j.contains("log_likelihood")) b.log_likelihood = j["log_likelihood"].get<double>();
    }
    if (fs::exists(dir / kMonthlyDeltaFile)) b.monthly_delta = monthly_delta_from_json(read_json_file(dir / kMonthlyDeltaFile));
    if (fs::exists(dir / kNuArFile)) b.nu_ar = nu_ar_from_json(read_json_file(dir / kNuArFile));
    if (fs::exists(dir / kCopulaFile)) b.copula = copula_from_json(read_json_file(dir / kCopulaFile));
    return b;
}

Provenance make_provenance(const PipelineConfig& cfg) {
    Provenance p;
    p.input_sha256 = sha256_file(cfg.data_path());
    p.config_sha256 = sha256_hex(to_json(cfg).dump());
    p.seed = cfg.simulate.seed;
    return p;
}

// ---------------------------------------------------------------------------
// Stages

namespace {

template <class F>
auto run_stage(const char* name, F&& f) {
    spdlog::info("stage {}", name);
    const std::string prefix = std::string("stage ") + name + ": ";
    try {
        return f();
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const DataError& e) {
        throw DataError(prefix + e.what());
    } catch (const NumericError& e) {
        throw NumericError(prefix + e.what());
    } catch (const std::domain_error& e) {
        throw NumericError(prefix + e.what());
    } catch (const std::invalid_argument& e) {
        throw NumericError(prefix + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(prefix + e.what());
    }
}

}  // namespace

ObservationSeries stage_ingest(const PipelineConfig& cfg) {
    return run_stage("ingest", [&] {
        if (cfg.data.path.empty()) throw ConfigError("data.path is not set");
        auto s = ingest_csv(cfg.data_path(), cfg.data.columns);
        spdlog::info("read {} observations from {}", s.size(), cfg.data_path().string());
        return s;
    });
}

void stage_fit_marginal(const PipelineConfig& cfg, const ObservationSeries& data, ModelBundle& bundle) {
    const auto values = data.values();
    const auto mm = run_stage("moment-matching", [&] { return fit_moment_matching(values); });
    const auto fit = run_stage("mle", [&] {
        MleOptions opts;
        opts.optimizer = cfg.marginal.optimizer;
        return fit_mle(values, mm, opts);
    });
    spdlog::info("mle: mu={} alpha={} beta={} delta={} ll={}", fit.params.mu(), fit.params.alpha(), fit.params.beta(),
                 fit.params.delta(), fit.log_likelihood);
    bundle.moment_matching = mm;
    bundle.marginal = fit.params;
    bundle.log_likelihood = fit.log_likelihood;
}

void stage_fit_seasonal(const PipelineConfig& cfg, const ObservationSeries& data, ModelBundle& bundle) {
    bundle.require(true, false, false);
    bundle.monthly_delta = run_stage("monthly-delta", [&] {
        MonthlyDeltaFitOptions opts;
        opts.min_observations = cfg.seasonal.min_observations;
        return fit_monthly_delta(data, *bundle.marginal, opts);
    });
    bundle.nu_ar = run_stage("nu-ar", [&] {
        NuArFitOptions opts;
        opts.sigma_floor_fraction = cfg.seasonal.sigma_floor_fraction;
        opts.min_months = cfg.seasonal.min_months;
        return fit_nu_ar(*bundle.monthly_delta, opts);
    });
}

PitSeries stage_pit(const ObservationSeries& data, const ModelBundle& bundle) {
    bundle.require(true, true, false);
    return run_stage("pit", [&] {
        const SeasonalNigMarginal marginal(*bundle.marginal, *bundle.monthly_delta, false);
        return pit_transform(data, marginal);
    });
}

void stage_build_copula(const PipelineConfig& cfg, const PitSeries& pit, ModelBundle& bundle) {
    const auto pairs = lag_pairs(pit);
    const std::size_t target = cfg.copula.target_per_rect.value_or(default_target_per_rect(pairs.size()));
    auto partition = run_stage("partition", [&] { return build_partition(pairs, target); });
    spdlog::info("partition: {} rectangles from {} pairs (target {})", partition.size(), pairs.size(), target);
    bundle.copula = run_stage("joint-cdf", [&] { return EmpiricalAutocopula(std::move(partition)); });
}

SimulationConfig simulation_config(const PipelineConfig& cfg, const ObservationSeries& data) {
    SimulationConfig sc;
    if (data.empty() && (!cfg.simulate.start || !cfg.simulate.horizon_days)) {
        throw ConfigError("simulate.start_date and horizon_days are required without data");
    }
    sc.start = cfg.simulate.start.value_or(data.empty() ? Date{} : data.records().front().date);
    sc.horizon = cfg.simulate.horizon_days.value_or(
        data.empty() ? 1
                     : static_cast<std::size_t>((data.records().back().date - data.records().front().date).count() + 1));
    sc.path_count = cfg.simulate.paths;
    sc.seed = cfg.simulate.seed;
    sc.conditioning = cfg.copula.conditioning;
    sc.x0 = cfg.simulate.x0;
    sc.delta_mode = cfg.simulate.delta_mode;
    sc.percentile_levels = cfg.simulate.levels;
    sc.threads = cfg.simulate.threads;
    return sc;
}

SimulationEnsemble stage_simulate(const PipelineConfig& cfg, const ObservationSeries& data, const ModelBundle& bundle) {
    bundle.require(true, true, true);
    return run_stage("simulate", [&] {
        const auto sc = simulation_config(cfg, data);
        return simulate_ensemble(sc, *bundle.copula, *bundle.marginal, *bundle.monthly_delta, *bundle.nu_ar);
    });
}

DeltaFan stage_delta_fan(const PipelineConfig& cfg, const ModelBundle& bundle) {
    bundle.require(true, true, false);
    return run_stage("delta-fan", [&] {
        if (cfg.seasonal.fan_paths == 0) throw ConfigError("seasonal.fan_paths must be >= 1 for a delta fan");
        const auto last = bundle.monthly_delta->entries().back();
        DeltaSimulationRequest req;
        req.last_observed = last.month;
        req.nu0 = std::sqrt(last.delta);
        req.horizon_months = cfg.seasonal.fan_horizon_months;
        req.path_count = cfg.seasonal.fan_paths;
        req.seed = cfg.simulate.seed;
        req.levels = cfg.seasonal.fan_levels;
        return simulate_delta_paths(*bundle.nu_ar, req).fan;
    });
}

TailDiagnostics stage_diagnose_tails(const PipelineConfig& cfg, const PitSeries& pit, const ModelBundle& bundle,
                                     const SimulationEnsemble* ensemble) {
    return run_stage("diagnose-tails", [&] {
        TailDiagnostics d;
        const auto grid = cfg.tail_grid();
        d.data = tail_dependence_curves(lag_pairs(pit), grid);
        if (ensemble) {
            bundle.require(true, true, false);
            const SeasonalNigMarginal marginal(*bundle.marginal, *bundle.monthly_delta, true);
            d.bands = tail_dependence_bands(*ensemble, marginal, grid);
            d.coverage = band_coverage(*d.bands, d.data);
            spdlog::info("tail band coverage: lower {:.3f}, upper {:.3f}", d.coverage->lower, d.coverage->upper);
        }
        return d;
    });
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    PipelineResult r;
    const auto data = stage_ingest(cfg);
    r.bundle.provenance = run_stage("provenance", [&] { return make_provenance(cfg); });
    stage_fit_marginal(cfg, data, r.bundle);
    stage_fit_seasonal(cfg, data, r.bundle);
    r.pit = stage_pit(data, r.bundle);
    stage_build_copula(cfg, r.pit, r.bundle);
    if (cfg.simulate.paths > 0) r.ensemble = stage_simulate(cfg, data, r.bundle);
    if (cfg.seasonal.fan_paths > 0) r.fan = stage_delta_fan(cfg, r.bundle);
    const bool bands = r.ensemble && r.ensemble->path_count >= kMinBandPaths;
    r.tails = stage_diagnose_tails(cfg, r.pit, r.bundle, bands ? &*r.ensemble : nullptr);

    run_stage("write", [&] {
        const auto& dir = cfg.output_dir;
        const auto& prov = r.bundle.provenance;
        write_bundle(dir, r.bundle);
        for (const char* f : {kMarginalFile, kMonthlyDeltaFile, kNuArFile, kCopulaFile, kProvenanceFile})
            r.written.push_back(dir / f);
        write_monthly_delta_csv(dir / "monthly_delta.csv", prov, *r.bundle.monthly_delta);
        r.written.push_back(dir / "monthly_delta.csv");
        write_tail_curves_csv(dir / "tail_curves.csv", prov, r.tails.data);
        r.written.push_back(dir / "tail_curves.csv");
        if (r.fan) {
            write_delta_fan_csv(dir / "delta_fan.csv", prov, *r.fan);
            r.written.push_back(dir / "delta_fan.csv");
        }
        if (r.ensemble) {
            write_percentiles_csv(dir / "percentiles.csv", prov, r.ensemble->percentiles);
            r.written.push_back(dir / "percentiles.csv");
            if (cfg.simulate.ensemble_format == EnsembleFormat::csv) {
                write_ensemble_csv(dir / "ensemble.csv", prov, *r.ensemble);
                r.written.push_back(dir / "ensemble.csv");
            } else if (cfg.simulate.ensemble_format == EnsembleFormat::binary) {
                write_ensemble_binary(dir / "ensemble.bin", prov, *r.ensemble);
                r.written.push_back(dir / "ensemble.bin");
            }
        }
        if (r.tails.bands) {
            write_tail_bands_csv(dir / "tail_bands.csv", prov, *r.tails.bands, &r.tails.data);
            r.written.push_back(dir / "tail_bands.csv");
        }
        Json summary;
        summary["observations"] = data.size();
        summary["log_likelihood"] = *r.bundle.log_likelihood;
        summary["months"] = r.bundle.monthly_delta->size();
        summary["rectangles"] = r.bundle.copula->partition().size();
        summary["paths"] = r.ensemble ? r.ensemble->path_count : 0;
        if (r.tails.coverage) {
            summary["tail_band_coverage"] = {{"lower", r.tails.coverage->lower}, {"upper", r.tails.coverage->upper}};
        }
        write_json_file(dir / "summary.json", prov, summary);
        r.written.push_back(dir / "summary.json");
        return 0;
    });
    return r;
}

// ---------------------------------------------------------------------------
// Plot data

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"fig1", "fig2", "fig3", "fig4", "fig5a", "fig5b", "fig5c", "fig6", "fig7"};
    return ids;
}

namespace {

template <class T>
const T& need(const T* p, const std::string& figure, const char* what) {
    if (!p) throw DataError("figure " + figure + " needs " + what);
    return *p;
}

constexpr std::size_t kSurfaceGrid = 51;
constexpr std::size_t kDensityGrid = 101;

}  // namespace

std::vector<fs::path> emit_plot_data(const PlotInputs& in, const std::string& figure, const fs::path& dir,
                                     const Provenance& prov) {
    if (figure == "all") {
        std::vector<fs::path> out;
        for (const auto& id : figure_ids()) {
            auto files = emit_plot_data(in, id, dir, prov);
            out.insert(out.end(), files.begin(), files.end());
        }
        return out;
    }
    fs::create_directories(dir);
    const fs::path file = dir / (figure + ".csv");
    if (figure == "fig1") {
        const auto& data = need(in.data, figure, "the input series");
        CsvWriter w(file, prov, {"date", "value", "pit"});
        for (std::size_t t = 0; t < data.size(); ++t) {
            w.cell(format_date(data[t].date)).cell(data[t].value);
            if (in.pit) w.cell(in.pit->values[t]);
            else w.cell(std::string_view(""));
            w.end_row();
        }
        w.close();
    } else if (figure == "fig2") {
        write_tail_curves_csv(file, prov, need(in.tails, figure, "tail diagnostics").data);
    } else if (figure == "fig3") {
        const auto& b = need(in.bundle, figure, "a model bundle");
        b.require(false, true, false);
        write_monthly_delta_csv(file, prov, *b.monthly_delta);
    } else if (figure == "fig4") {
        write_delta_fan_csv(file, prov, need(in.fan, figure, "a delta fan (seasonal.fan_paths > 0)"));
    } else if (figure == "fig5a") {
        const auto& pit = need(in.pit, figure, "PIT values");
        CsvWriter w(file, prov, {"v_prev", "v_next"});
        for (const auto& p : lag_pairs(pit)) {
            w.cell(p.prev).cell(p.next);
            w.end_row();
        }
        w.close();
    } else if (figure == "fig5b") {
        const auto& b = need(in.bundle, figure, "a model bundle");
        b.require(false, false, true);
        CsvWriter w(file, prov, {"u1", "u2", "copula"});
        for (std::size_t i = 0; i < kSurfaceGrid; ++i) {
            for (std::size_t j = 0; j < kSurfaceGrid; ++j) {
                const double u1 = static_cast<double>(i) / (kSurfaceGrid - 1);
                const double u2 = static_cast<double>(j) / (kSurfaceGrid - 1);
                w.cell(u1).cell(u2).cell(b.copula->evaluate(u1, u2));
                w.end_row();
            }
        }
        w.close();
    } else if (figure == "fig5c") {
        const auto& b = need(in.bundle, figure, "a model bundle");
        b.require(false, false, true);
        const auto& c = *b.copula;
        // Cell midpoints of a regular grid in v-space; the joint density is
        // constant on each partition rectangle.
        CsvWriter w(file, prov, {"v_prev", "v_next", "density", "copula_density"});
        for (std::size_t i = 0; i < kDensityGrid; ++i) {
            for (std::size_t j = 0; j < kDensityGrid; ++j) {
                const double x = (static_cast<double>(i) + 0.5) / kDensityGrid;
                const double y = (static_cast<double>(j) + 0.5) / kDensityGrid;
                w.cell(x).cell(y).cell(c.density(x, y)).cell(c.copula_density(c.phi1(x), c.phi2(y)));
                w.end_row();
            }
        }
        w.close();
    } else if (figure == "fig6") {
        const auto& e = need(in.ensemble, figure, "a simulated ensemble (simulate.paths > 0)");
        const auto& p = e.percentiles;
        std::vector<std::string> header{"year", "month"};
        for (double l : p.levels) header.push_back("sim_p" + format_double(100.0 * l));
        header.emplace_back("data_max");
        header.emplace_back("data_min");
        CsvWriter w(file, prov, header);
        for (std::size_t m = 0; m < p.months.size(); ++m) {
            w.cell(std::int64_t{p.months[m].year}).cell(std::int64_t{p.months[m].month});
            for (std::size_t l = 0; l < p.levels.size(); ++l) w.cell(p.value(m, l));
            double lo = INFINITY;
            double hi = -INFINITY;
            if (in.data) {
                for (const auto& r : in.data->records()) {
                    if (year_month_of(r.date) == p.months[m]) {
                        lo = std::min(lo, r.value);
                        hi = std::max(hi, r.value);
                    }
                }
            }
            if (std::isfinite(hi)) w.cell(hi).cell(lo);
            else w.cell(std::string_view("")).cell(std::string_view(""));
            w.end_row();
        }
        w.close();
    } else if (figure == "fig7") {
        const auto& t = need(in.tails, figure, "tail diagnostics");
        if (!t.bands) throw DataError("figure fig7 needs tail bands (simulate.paths >= 20)");
        write_tail_bands_csv(file, prov, *t.bands, &t.data);
    } else {
        throw ConfigError("unknown figure '" + figure + "'");
    }
    return {file};
}

}  // namespace acop
