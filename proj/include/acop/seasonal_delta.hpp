#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "acop/calendar.hpp"
#include "acop/nig.hpp"
#include "acop/rng.hpp"
#include "acop/series.hpp"

namespace acop {

struct MonthlyDelta {
    YearMonth month;
    double delta;
};

/// Per-month NIG scale estimates. Months are consecutive without gaps and
/// every delta is strictly positive.
class MonthlyDeltaSeries {
public:
    MonthlyDeltaSeries() = default;
    /// Throws std::invalid_argument on gaps, disorder or non-positive delta.
    explicit MonthlyDeltaSeries(std::vector<MonthlyDelta> entries);

    [[nodiscard]] std::span<const MonthlyDelta> entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    [[nodiscard]] std::optional<double> delta_for(YearMonth ym) const noexcept;
    /// Mean delta per calendar month (January first); months with no entry
    /// take the overall mean.
    [[nodiscard]] std::array<double, 12> climatology() const;

private:
    std::vector<MonthlyDelta> entries_;
};

// Harmonic regression basis: constant plus cos/sin pairs at periods of 12, 6,
// 4 and 3 months. t is a YearMonth::index(), so t = 0 is a January.
inline constexpr std::array<double, 4> kHarmonicPeriods{12.0, 6.0, 4.0, 3.0};
inline constexpr std::size_t kHarmonicBasisSize = 1 + 2 * kHarmonicPeriods.size();

/// [c0, cos(2 pi t/12), sin(2 pi t/12), cos(2 pi t/6), sin(...), ...]
using HarmonicCoeffs = std::array<double, kHarmonicBasisSize>;

HarmonicCoeffs harmonic_basis(double t) noexcept;
double seasonal_value(const HarmonicCoeffs& coeffs, double t) noexcept;

/// nu_{t+1} = a nu_t + b(t) + sigma(t) z_{t+1}, nu = sqrt(delta).
/// b(t) uses `mean_coeffs`; sigma(t)^2 = max(seasonal_value(variance_coeffs, t), sigma_floor^2).
struct NuArModel {
    double a = 0.0;
    HarmonicCoeffs mean_coeffs{};
    HarmonicCoeffs variance_coeffs{};
    double sigma_floor = 0.0;

    /// |a| < 1, finite coefficients, sigma_floor >= 0. Fitted models always
    /// have sigma_floor > 0; zero is accepted for deterministic models.
    void validate() const;
    [[nodiscard]] double drift(double t) const noexcept { return seasonal_value(mean_coeffs, t); }
    [[nodiscard]] double sigma(double t) const noexcept;
};

struct MonthlyDeltaFitOptions {
    std::size_t min_observations = 5;
    double log_tolerance = 1e-8;
};

/// Observations of one calendar month.
struct MonthSample {
    YearMonth month;
    std::vector<double> values;
};

/// Grouped form; months must be consecutive.
MonthlyDeltaSeries fit_monthly_delta(std::span<const MonthSample> months, const NigParams& shared,
                                     const MonthlyDeltaFitOptions& options = {});

/// Maximises sum_t log f(x_t; mu, alpha, beta, delta_{month(t)}) over the
/// monthly deltas with (mu, alpha, beta) from `shared`. The likelihood
/// separates by month, so each month is a 1-D problem in log delta.
/// Throws DataError listing months with fewer than min_observations points.
MonthlyDeltaSeries fit_monthly_delta(const ObservationSeries& data, const NigParams& shared,
                                     const MonthlyDeltaFitOptions& options = {});

struct NuArFitOptions {
    double sigma_floor_fraction = 0.05;
    std::size_t min_months = 36;
};

struct NuArFit {
    NuArModel model;
    std::vector<double> residuals;  // of the mean regression, one per transition
};

/// Two-stage least squares: (a, b) from nu_{t+1} on [nu_t, basis(t)], then
/// the squared residuals on basis(t). Rank-deficient designs are solved in
/// the minimum-norm sense.
NuArFit fit_nu_ar_detailed(const MonthlyDeltaSeries& deltas, const NuArFitOptions& options = {});
NuArModel fit_nu_ar(const MonthlyDeltaSeries& deltas, const NuArFitOptions& options = {});

/// Lower bound applied to simulated nu so that delta = nu^2 stays positive.
inline constexpr double kNuFloor = 1e-4;

/// delta for months last_observed+1 .. last_observed+horizon, starting from
/// nu at last_observed.
std::vector<double> simulate_delta_path(const NuArModel& model, YearMonth last_observed, double nu0,
                                        std::size_t horizon, RandomStream& rng);

struct DeltaFan {
    std::vector<double> levels;      // probabilities in [0,1], ascending
    std::vector<YearMonth> months;
    std::vector<double> values;      // months x levels, row-major
    std::size_t path_count = 0;

    [[nodiscard]] double value(std::size_t month, std::size_t level) const {
        return values[month * levels.size() + level];
    }
};

struct DeltaSimulationRequest {
    YearMonth last_observed;
    double nu0 = 1.0;
    std::size_t horizon_months = 120;
    std::size_t path_count = 20000;
    std::uint64_t seed = 1;
    std::vector<double> levels{0.01, 0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95, 0.99};
};

struct DeltaSimulation {
    DeltaFan fan;
    std::size_t horizon = 0;
    std::vector<double> paths;  // path_count x horizon, row-major

    [[nodiscard]] std::span<const double> path(std::size_t i) const {
        return std::span<const double>(paths).subspan(i * horizon, horizon);
    }
};

/// Independent paths, path i drawing from RandomStream(seed, i, delta domain).
DeltaSimulation simulate_delta_paths(const NuArModel& model, const DeltaSimulationRequest& request);

}  // namespace acop
