#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "acop/error.hpp"
#include "acop/fixture.hpp"
#include "acop/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int { kOk = 0, kOther = 1, kConfig = 2, kData = 3, kNumeric = 4 };

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::string> data;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::string> conditioning;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config, "JSON configuration file")->required();
    cmd->add_option("-o,--out", o.out, "output directory (overrides output.directory)");
    cmd->add_option("--data", o.data, "input CSV (overrides data.path)");
    cmd->add_option("--seed", o.seed, "random seed (overrides simulate.seed)");
    cmd->add_option("--paths", o.paths, "number of simulated paths (overrides simulate.paths)");
    cmd->add_option("--conditioning", o.conditioning, "cumulative or partial (overrides copula.conditioning)");
}

acop::PipelineConfig resolve(const Overrides& o) {
    auto cfg = acop::load_config(o.config);
    if (o.out) cfg.output_dir = *o.out;
    if (o.data) cfg.data.path = fs::absolute(*o.data).string();
    if (o.seed) cfg.simulate.seed = *o.seed;
    if (o.paths) cfg.simulate.paths = *o.paths;
    if (o.conditioning) {
        if (*o.conditioning == "cumulative") cfg.copula.conditioning = acop::ConditioningMode::cumulative;
        else if (*o.conditioning == "partial") cfg.copula.conditioning = acop::ConditioningMode::partial;
        else throw acop::ConfigError("--conditioning must be 'cumulative' or 'partial'");
    }
    return cfg;
}

void configure_logging() {
    spdlog::set_default_logger(spdlog::stderr_color_mt("acop"));
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("ACOP_LOG_LEVEL")) {
        const auto level = spdlog::level::from_str(env);
        if (level == spdlog::level::off && std::string(env) != "off") {
            throw acop::ConfigError(std::string("ACOP_LOG_LEVEL: unknown level '") + env + "'");
        }
        spdlog::set_level(level);
    }
}

void report(const std::vector<fs::path>& files) {
    for (const auto& f : files) std::cout << f.string() << '\n';
}

int run(int argc, char** argv) {
    CLI::App app{"Seasonal NIG marginals with an empirical autocopula: fit, simulate, diagnose."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ACOP_VERSION));

    Overrides o;
    auto* fit_marginal = app.add_subcommand("fit-marginal", "moment matching and MLE of the global NIG law");
    auto* fit_seasonal = app.add_subcommand("fit-seasonal", "monthly delta and the nu AR model (needs marginal.json)");
    auto* build_copula = app.add_subcommand("build-copula", "empirical autocopula from PIT pairs");
    auto* simulate = app.add_subcommand("simulate", "simulate an ensemble from a fitted bundle");
    auto* diagnose = app.add_subcommand("diagnose-tails", "data tail curves and simulated bands");
    auto* pipeline = app.add_subcommand("pipeline", "run every stage");
    auto* emit = app.add_subcommand("emit-plots", "write figure-ready CSV files");
    for (auto* cmd : {fit_marginal, fit_seasonal, build_copula, simulate, diagnose, pipeline, emit}) add_common(cmd, o);

    std::string figure = "all";
    emit->add_option("--figure", figure, "fig1..fig7, fig5a/fig5b/fig5c or all");

    auto* gen = app.add_subcommand("generate-fixture", "write the synthetic fixture CSV");
    std::string fixture_out = "fixture.csv";
    acop::FixtureSpec spec;
    gen->add_option("-o,--out", fixture_out, "output CSV path");
    gen->add_option("--seed", spec.seed, "generator seed");
    gen->add_option("--years", spec.years, "number of years")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }
    configure_logging();

    if (gen->parsed()) {
        const auto fx = acop::generate_fixture(spec);
        acop::write_fixture_csv(fixture_out, fx, spec);
        std::cout << fixture_out << '\n';
        return kOk;
    }

    const auto cfg = resolve(o);
    const auto& dir = cfg.output_dir;
    fs::create_directories(dir);

    if (pipeline->parsed()) {
        const auto r = acop::run_pipeline(cfg);
        report(r.written);
        if (r.tails.coverage) {
            std::cout << "tail band coverage: lower " << r.tails.coverage->lower << ", upper " << r.tails.coverage->upper
                      << '\n';
        }
        return kOk;
    }

    const auto data = acop::stage_ingest(cfg);
    if (fit_marginal->parsed()) {
        acop::ModelBundle b;
        b.provenance = acop::make_provenance(cfg);
        acop::stage_fit_marginal(cfg, data, b);
        acop::write_bundle(dir, b);
        report({dir / acop::kMarginalFile, dir / acop::kProvenanceFile});
        return kOk;
    }

    auto bundle = acop::load_bundle(dir);
    bundle.provenance = acop::make_provenance(cfg);
    if (fit_seasonal->parsed()) {
        acop::stage_fit_seasonal(cfg, data, bundle);
        acop::write_bundle(dir, bundle);
        std::vector<fs::path> files{dir / acop::kMonthlyDeltaFile, dir / acop::kNuArFile};
        if (cfg.seasonal.fan_paths > 0) {
            acop::write_delta_fan_csv(dir / "delta_fan.csv", bundle.provenance, acop::stage_delta_fan(cfg, bundle));
            files.push_back(dir / "delta_fan.csv");
        }
        report(files);
        return kOk;
    }

    const auto pit = acop::stage_pit(data, bundle);
    if (build_copula->parsed()) {
        acop::stage_build_copula(cfg, pit, bundle);
        acop::write_bundle(dir, bundle);
        report({dir / acop::kCopulaFile});
        return kOk;
    }

    std::optional<acop::SimulationEnsemble> ensemble;
    if (cfg.simulate.paths > 0) ensemble = acop::stage_simulate(cfg, data, bundle);

    if (simulate->parsed()) {
        if (!ensemble) throw acop::ConfigError("simulate.paths must be >= 1 (or pass --paths)");
        std::vector<fs::path> files{dir / "percentiles.csv"};
        acop::write_percentiles_csv(files.back(), bundle.provenance, ensemble->percentiles);
        if (cfg.simulate.ensemble_format == acop::EnsembleFormat::csv) {
            files.push_back(dir / "ensemble.csv");
            acop::write_ensemble_csv(files.back(), bundle.provenance, *ensemble);
        } else if (cfg.simulate.ensemble_format == acop::EnsembleFormat::binary) {
            files.push_back(dir / "ensemble.bin");
            acop::write_ensemble_binary(files.back(), bundle.provenance, *ensemble);
        }
        report(files);
        return kOk;
    }

    const bool bands = ensemble && ensemble->path_count >= acop::kMinBandPaths;
    const auto tails = acop::stage_diagnose_tails(cfg, pit, bundle, bands ? &*ensemble : nullptr);
    if (diagnose->parsed()) {
        std::vector<fs::path> files{dir / "tail_curves.csv"};
        acop::write_tail_curves_csv(files.back(), bundle.provenance, tails.data);
        if (tails.bands) {
            files.push_back(dir / "tail_bands.csv");
            acop::write_tail_bands_csv(files.back(), bundle.provenance, *tails.bands, &tails.data);
        }
        report(files);
        if (tails.coverage) {
            std::cout << "tail band coverage: lower " << tails.coverage->lower << ", upper " << tails.coverage->upper
                      << '\n';
        }
        return kOk;
    }

    // emit-plots
    std::optional<acop::DeltaFan> fan;
    if (cfg.seasonal.fan_paths > 0 && bundle.nu_ar) fan = acop::stage_delta_fan(cfg, bundle);
    acop::PlotInputs in;
    in.data = &data;
    in.pit = &pit;
    in.bundle = &bundle;
    in.ensemble = ensemble ? &*ensemble : nullptr;
    in.tails = &tails;
    in.fan = fan ? &*fan : nullptr;
    report(acop::emit_plot_data(in, figure, dir / "plots", bundle.provenance));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const acop::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const acop::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const acop::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kOther;
    }
}
