#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "acop/autocopula.hpp"
#include "acop/calendar.hpp"
#include "acop/marginal.hpp"
#include "acop/nig.hpp"
#include "acop/rng.hpp"
#include "acop/seasonal_delta.hpp"

namespace acop {

enum class DeltaMode {
    frozen,     // fitted monthly deltas (climatology outside the fitted range)
    simulated,  // each path draws its own delta path from the nu AR model
};

struct SimulationConfig {
    Date start{};
    std::size_t horizon = 1;  // days
    std::size_t path_count = 1;
    std::uint64_t seed = 1;
    ConditioningMode conditioning = ConditioningMode::cumulative;
    std::optional<double> x0;  // default: median of F at `start`
    DeltaMode delta_mode = DeltaMode::frozen;
    std::vector<double> percentile_levels{0.01, 0.05, 0.50, 0.95, 0.99};
    unsigned threads = 0;  // 0: hardware concurrency

    /// Throws ConfigError.
    void validate() const;
};

struct MonthlyPercentiles {
    std::vector<double> levels;
    std::vector<YearMonth> months;
    std::vector<double> values;  // months x levels

    [[nodiscard]] double value(std::size_t month, std::size_t level) const {
        return values[month * levels.size() + level];
    }
};

struct SimulationEnsemble {
    std::vector<Date> dates;
    std::size_t path_count = 0;
    std::vector<double> values;  // path_count x dates.size(), row-major
    MonthlyPercentiles percentiles;

    [[nodiscard]] std::size_t horizon() const noexcept { return dates.size(); }
    [[nodiscard]] std::span<const double> path(std::size_t i) const {
        return std::span<const double>(values).subspan(i * dates.size(), dates.size());
    }
};

std::vector<Date> consecutive_dates(Date start, std::size_t count);

/// One path of the Markov chain:
///   v_0 = F_0(x_0); u1 = Phi1(v_t); u2 = conditional^-1(U); v_{t+1} = Phi2^-1(u2);
///   x_t = F_t^-1(v_t) for t >= 1. Returns x_0 .. x_{n-1} for the given dates.
std::vector<double> simulate_path(std::span<const Date> dates, double x0, ConditioningMode mode,
                                  const Autocopula& copula, const MarginalModel& marginal, RandomStream& rng);

/// Pools all values of each calendar month across paths.
MonthlyPercentiles monthly_percentiles(std::span<const Date> dates, std::span<const double> values,
                                       std::size_t path_count, std::span<const double> levels);

/// Paths use RandomStream(seed, path, copula domain). Results do not depend
/// on the thread count.
SimulationEnsemble simulate_ensemble(const SimulationConfig& cfg, const Autocopula& copula,
                                     const MarginalModel& marginal);

/// Seasonal NIG marginals; honours cfg.delta_mode. In simulated mode path p
/// draws its delta path from RandomStream(seed, p, delta domain), started at
/// the month before cfg.start from nu = sqrt(fitted or climatological delta).
SimulationEnsemble simulate_ensemble(const SimulationConfig& cfg, const Autocopula& copula, const NigParams& shared,
                                     const MonthlyDeltaSeries& deltas, const NuArModel& nu_model);

// Closed-form copulas (test oracles and reference models).

class IndependenceCopula final : public Autocopula {
public:
    [[nodiscard]] double evaluate(double u1, double u2) const override { return u1 * u2; }
    [[nodiscard]] double phi1(double v) const override { return v; }
    [[nodiscard]] double phi2_inverse(double u) const override { return u; }
    [[nodiscard]] double sample_conditional(double, double uniform, ConditioningMode) const override {
        return uniform;
    }
};

/// M(u, v) = min(u, v). Cumulative: u2 = U u1; partial: u2 = u1.
class ComonotoneCopula final : public Autocopula {
public:
    [[nodiscard]] double evaluate(double u1, double u2) const override { return u1 < u2 ? u1 : u2; }
    [[nodiscard]] double phi1(double v) const override { return v; }
    [[nodiscard]] double phi2_inverse(double u) const override { return u; }
    [[nodiscard]] double sample_conditional(double u1, double uniform, ConditioningMode mode) const override {
        return mode == ConditioningMode::partial ? u1 : uniform * u1;
    }
};

/// Gaussian copula with correlation rho. Only the partial conditioning has a
/// closed form: u2 = N(rho N^-1(u1) + sqrt(1 - rho^2) N^-1(U)).
class GaussianCopula final : public Autocopula {
public:
    explicit GaussianCopula(double rho);
    [[nodiscard]] double rho() const noexcept { return rho_; }
    [[nodiscard]] double evaluate(double u1, double u2) const override;
    [[nodiscard]] double phi1(double v) const override { return v; }
    [[nodiscard]] double phi2_inverse(double u) const override { return u; }
    /// Throws ConfigError for cumulative conditioning.
    [[nodiscard]] double sample_conditional(double u1, double uniform, ConditioningMode mode) const override;

private:
    double rho_;
};

struct Ar1Spec {
    double alpha = 0.0;
    double beta = 0.0;
    double sigma = 1.0;

    void validate() const;
    [[nodiscard]] double stationary_mean() const { return beta / (1.0 - alpha); }
    [[nodiscard]] double stationary_variance() const { return sigma * sigma / (1.0 - alpha * alpha); }
};

struct Ar1OracleResult {
    std::vector<double> direct;
    std::vector<double> framework;
};

/// direct: y_t = alpha y_{t-1} + beta + sigma e_t from the stationary law,
/// stream (seed, 0). framework: stationary normal marginal with the Gaussian
/// copula (rho = alpha) under partial conditioning, stream (seed, 1).
Ar1OracleResult ar1_gaussian_copula_oracle(const Ar1Spec& spec, std::size_t n, std::uint64_t seed);

struct TailBands {
    std::vector<double> grid;
    std::vector<double> lower_lo, lower_mid, lower_hi;
    std::vector<double> upper_lo, upper_mid, upper_hi;
};

inline constexpr std::size_t kMinBandPaths = 20;

/// PIT each path through `marginal`, take rank-based tail curves of its lag
/// pairs, then the per-u quantiles (lo_level, 0.5, hi_level) across paths.
TailBands tail_dependence_bands(const SimulationEnsemble& ensemble, const MarginalModel& marginal,
                                std::span<const double> grid, double lo_level = 0.05, double hi_level = 0.95);

struct BandCoverage {
    double lower = 0.0;  // fraction of grid points with lo <= curve <= hi
    double upper = 0.0;
};

BandCoverage band_coverage(const TailBands& bands, const TailCurves& curves);

}  // namespace acop
