#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "acop/autocopula.hpp"
#include "acop/nig.hpp"
#include "acop/seasonal_delta.hpp"
#include "acop/serialize.hpp"
#include "acop/series.hpp"
#include "acop/simulator.hpp"

namespace acop {

struct DataConfig {
    std::string path;  // relative paths resolve against the config file's directory
    CsvColumns columns;
};

struct MarginalConfig {
    NelderMeadOptions optimizer;
};

struct SeasonalConfig {
    std::size_t min_observations = 5;
    std::size_t min_months = 36;
    double sigma_floor_fraction = 0.05;
    std::size_t fan_paths = 0;  // 0: no delta fan
    std::size_t fan_horizon_months = 120;
    std::vector<double> fan_levels{0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95, 0.99};
};

struct CopulaConfig {
    std::optional<std::size_t> target_per_rect;  // default: default_target_per_rect(n)
    ConditioningMode conditioning = ConditioningMode::cumulative;
};

enum class EnsembleFormat { none, csv, binary };

struct SimulateConfig {
    std::size_t paths = 0;                  // 0: fit-only run
    std::optional<std::size_t> horizon_days;  // default: span of the data
    std::optional<Date> start;              // default: first data date
    std::uint64_t seed = 1;
    std::optional<double> x0;
    DeltaMode delta_mode = DeltaMode::frozen;
    std::vector<double> levels{0.01, 0.05, 0.50, 0.95, 0.99};
    double tail_grid_start = 0.02;
    double tail_grid_stop = 0.98;
    double tail_grid_step = 0.02;
    EnsembleFormat ensemble_format = EnsembleFormat::none;
    unsigned threads = 0;
};

struct PipelineConfig {
    std::filesystem::path base_dir = ".";
    std::filesystem::path output_dir = "out";
    DataConfig data;
    MarginalConfig marginal;
    SeasonalConfig seasonal;
    CopulaConfig copula;
    SimulateConfig simulate;

    [[nodiscard]] std::filesystem::path data_path() const;
    [[nodiscard]] std::vector<double> tail_grid() const;
};

/// Parses a JSON config with optional sections data, marginal, seasonal,
/// copula, simulate, output. Unknown keys and bad values raise ConfigError.
PipelineConfig parse_config(const Json& j, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);
/// Canonical JSON of the effective configuration (after overrides).
Json to_json(const PipelineConfig& cfg);

struct ModelBundle {
    std::optional<NigParams> marginal;
    std::optional<NigParams> moment_matching;
    std::optional<double> log_likelihood;
    std::optional<MonthlyDeltaSeries> monthly_delta;
    std::optional<NuArModel> nu_ar;
    std::optional<EmpiricalAutocopula> copula;
    Provenance provenance;

    /// Throws DataError naming the first missing component.
    void require(bool marginal, bool seasonal, bool copula) const;
};

inline constexpr const char* kMarginalFile = "marginal.json";
inline constexpr const char* kMonthlyDeltaFile = "monthly_delta.json";
inline constexpr const char* kNuArFile = "nu_ar.json";
inline constexpr const char* kCopulaFile = "copula.json";
inline constexpr const char* kProvenanceFile = "provenance.json";

/// Writes the components that are present.
void write_bundle(const std::filesystem::path& dir, const ModelBundle& bundle);
/// Loads whatever components exist in `dir`.
ModelBundle load_bundle(const std::filesystem::path& dir);

Provenance make_provenance(const PipelineConfig& cfg);

// Stages. Each rethrows failures prefixed with the stage name and keeps the
// error category (ConfigError, DataError, NumericError).
ObservationSeries stage_ingest(const PipelineConfig& cfg);
void stage_fit_marginal(const PipelineConfig& cfg, const ObservationSeries& data, ModelBundle& bundle);
void stage_fit_seasonal(const PipelineConfig& cfg, const ObservationSeries& data, ModelBundle& bundle);
PitSeries stage_pit(const ObservationSeries& data, const ModelBundle& bundle);
void stage_build_copula(const PipelineConfig& cfg, const PitSeries& pit, ModelBundle& bundle);
SimulationConfig simulation_config(const PipelineConfig& cfg, const ObservationSeries& data);
SimulationEnsemble stage_simulate(const PipelineConfig& cfg, const ObservationSeries& data, const ModelBundle& bundle);
DeltaFan stage_delta_fan(const PipelineConfig& cfg, const ModelBundle& bundle);

struct TailDiagnostics {
    TailCurves data;
    std::optional<TailBands> bands;
    std::optional<BandCoverage> coverage;
};

TailDiagnostics stage_diagnose_tails(const PipelineConfig& cfg, const PitSeries& pit, const ModelBundle& bundle,
                                     const SimulationEnsemble* ensemble);

struct PipelineResult {
    ModelBundle bundle;
    PitSeries pit;
    std::optional<SimulationEnsemble> ensemble;
    std::optional<DeltaFan> fan;
    TailDiagnostics tails;
    std::vector<std::filesystem::path> written;
};

/// ingest -> moment matching -> MLE -> monthly delta -> nu AR -> PIT ->
/// partition -> copula -> (simulate -> tail bands when paths > 0). Writes the
/// bundle and reports into cfg.output_dir.
PipelineResult run_pipeline(const PipelineConfig& cfg);

struct PlotInputs {
    const ObservationSeries* data = nullptr;
    const PitSeries* pit = nullptr;
    const ModelBundle* bundle = nullptr;
    const SimulationEnsemble* ensemble = nullptr;
    const TailDiagnostics* tails = nullptr;
    const DeltaFan* fan = nullptr;
};

/// Figure ids: fig1 (series), fig2 (data tail curves), fig3 (monthly delta),
/// fig4 (delta fan), fig5a (PIT pair scatter), fig5b (copula surface),
/// fig5c (joint density grid), fig6 (ensemble percentiles with data),
/// fig7 (tail bands with data curves). Throws DataError when an input the
/// figure needs is absent. Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const PlotInputs& in, const std::string& figure,
                                                  const std::filesystem::path& dir, const Provenance& prov);
const std::vector<std::string>& figure_ids();

}  // namespace acop
