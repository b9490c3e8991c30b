#include "acop/seasonal_delta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "acop/error.hpp"
#include "acop/stats.hpp"

namespace acop {

MonthlyDeltaSeries::MonthlyDeltaSeries(std::vector<MonthlyDelta> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (!(e.delta > 0.0) || !std::isfinite(e.delta)) {
            throw std::invalid_argument("monthly delta for " + e.month.str() + " must be positive and finite");
        }
        if (i > 0 && e.month.index() != entries_[i - 1].month.index() + 1) {
            throw std::invalid_argument("monthly deltas must be consecutive: " + entries_[i - 1].month.str() +
                                        " followed by " + e.month.str());
        }
    }
}

std::optional<double> MonthlyDeltaSeries::delta_for(YearMonth ym) const noexcept {
    if (entries_.empty()) return std::nullopt;
    const int offset = ym.index() - entries_.front().month.index();
    if (offset < 0 || offset >= static_cast<int>(entries_.size())) return std::nullopt;
    return entries_[static_cast<std::size_t>(offset)].delta;
}

std::array<double, 12> MonthlyDeltaSeries::climatology() const {
    if (entries_.empty()) throw std::logic_error("climatology of an empty delta series");
    std::array<double, 12> sum{};
    std::array<int, 12> count{};
    double total = 0.0;
    for (const auto& e : entries_) {
        sum[e.month.month - 1] += e.delta;
        ++count[e.month.month - 1];
        total += e.delta;
    }
    const double overall = total / static_cast<double>(entries_.size());
    std::array<double, 12> out{};
    for (std::size_t m = 0; m < 12; ++m) out[m] = count[m] > 0 ? sum[m] / count[m] : overall;
    return out;
}

HarmonicCoeffs harmonic_basis(double t) noexcept {
    // Reduce the phase to one year first so basis(t) == basis(t + 12) holds
    // to rounding for any integer t.
    t -= 12.0 * std::floor(t / 12.0);
    HarmonicCoeffs b{};
    b[0] = 1.0;
    for (std::size_t k = 0; k < kHarmonicPeriods.size(); ++k) {
        const double phase = 2.0 * std::numbers::pi * t / kHarmonicPeriods[k];
        b[1 + 2 * k] = std::cos(phase);
        b[2 + 2 * k] = std::sin(phase);
    }
    return b;
}

double seasonal_value(const HarmonicCoeffs& coeffs, double t) noexcept {
    const auto b = harmonic_basis(t);
    double v = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) v += coeffs[i] * b[i];
    return v;
}

void NuArModel::validate() const {
    if (!std::isfinite(a) || !(std::abs(a) < 1.0)) throw std::invalid_argument("nu AR model: require |a| < 1");
    for (double c : mean_coeffs)
        if (!std::isfinite(c)) throw std::invalid_argument("nu AR model: non-finite mean coefficient");
    for (double c : variance_coeffs)
        if (!std::isfinite(c)) throw std::invalid_argument("nu AR model: non-finite variance coefficient");
    if (!(sigma_floor >= 0.0) || !std::isfinite(sigma_floor)) {
        throw std::invalid_argument("nu AR model: sigma_floor must be >= 0");
    }
}

double NuArModel::sigma(double t) const noexcept {
    return std::sqrt(std::max(seasonal_value(variance_coeffs, t), sigma_floor * sigma_floor));
}

MonthlyDeltaSeries fit_monthly_delta(std::span<const MonthSample> months, const NigParams& shared,
                                     const MonthlyDeltaFitOptions& options) {
    if (months.empty()) throw DataError("fit_monthly_delta: no data");
    std::string short_months;
    for (const auto& m : months) {
        if (m.values.size() < options.min_observations) {
            short_months += " " + m.month.str() + "(" + std::to_string(m.values.size()) + ")";
        }
    }
    if (!short_months.empty()) {
        throw DataError("months with fewer than " + std::to_string(options.min_observations) +
                        " observations:" + short_months);
    }
    std::vector<MonthlyDelta> out;
    out.reserve(months.size());
    for (const auto& m : months) {
        const auto fit = fit_delta_given_shape(m.values, shared, options.log_tolerance);
        out.push_back({m.month, fit.delta});
    }
    try {
        return MonthlyDeltaSeries(std::move(out));
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("fit_monthly_delta: ") + e.what());
    }
}

MonthlyDeltaSeries fit_monthly_delta(const ObservationSeries& data, const NigParams& shared,
                                     const MonthlyDeltaFitOptions& options) {
    if (data.empty()) throw DataError("fit_monthly_delta: empty series");
    const auto recs = data.records();
    const YearMonth first = year_month_of(recs.front().date);
    const YearMonth last = year_month_of(recs.back().date);
    std::vector<MonthSample> months(static_cast<std::size_t>(last.index() - first.index() + 1));
    for (std::size_t m = 0; m < months.size(); ++m) months[m].month = YearMonth::from_index(first.index() + static_cast<int>(m));
    for (const auto& r : recs) {
        months[static_cast<std::size_t>(year_month_of(r.date).index() - first.index())].values.push_back(r.value);
    }
    return fit_monthly_delta(months, shared, options);
}

NuArFit fit_nu_ar_detailed(const MonthlyDeltaSeries& deltas, const NuArFitOptions& options) {
    const auto entries = deltas.entries();
    if (entries.size() < options.min_months) {
        throw DataError("fit_nu_ar: need at least " + std::to_string(options.min_months) + " monthly values, got " +
                        std::to_string(entries.size()));
    }
    constexpr auto kCols = static_cast<Eigen::Index>(1 + kHarmonicBasisSize);
    const auto rows = static_cast<Eigen::Index>(entries.size() - 1);
    if (rows < kCols) throw NumericError("fit_nu_ar: degenerate design (fewer transitions than regressors)");

    Eigen::MatrixXd design(rows, kCols);
    Eigen::VectorXd target(rows);
    Eigen::MatrixXd basis(rows, static_cast<Eigen::Index>(kHarmonicBasisSize));
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& cur = entries[static_cast<std::size_t>(r)];
        const auto& nxt = entries[static_cast<std::size_t>(r) + 1];
        const auto b = harmonic_basis(static_cast<double>(cur.month.index()));
        design(r, 0) = std::sqrt(cur.delta);
        for (std::size_t k = 0; k < b.size(); ++k) {
            design(r, static_cast<Eigen::Index>(k) + 1) = b[k];
            basis(r, static_cast<Eigen::Index>(k)) = b[k];
        }
        target(r) = std::sqrt(nxt.delta);
    }
    if (!design.allFinite() || !target.allFinite()) throw NumericError("fit_nu_ar: non-finite design matrix");

    const Eigen::VectorXd coef = design.completeOrthogonalDecomposition().solve(target);
    const Eigen::VectorXd resid = target - design * coef;
    if (!coef.allFinite()) throw NumericError("fit_nu_ar: degenerate design matrix");

    NuArFit fit;
    fit.model.a = coef(0);
    for (std::size_t k = 0; k < kHarmonicBasisSize; ++k) fit.model.mean_coeffs[k] = coef(static_cast<Eigen::Index>(k) + 1);
    if (!(std::abs(fit.model.a) < 1.0)) {
        throw NumericError("fit_nu_ar: fitted AR coefficient |a| = " + std::to_string(std::abs(fit.model.a)) +
                           " >= 1 (non-stationary); consider a shorter harmonic basis");
    }

    const Eigen::VectorXd sq = resid.array().square().matrix();
    const Eigen::VectorXd var_coef = basis.completeOrthogonalDecomposition().solve(sq);
    for (std::size_t k = 0; k < kHarmonicBasisSize; ++k) fit.model.variance_coeffs[k] = var_coef(static_cast<Eigen::Index>(k));

    const double resid_sd = std::sqrt(sq.mean());
    const double mean_nu = design.col(0).mean();
    // A perfectly fitted series has zero residual spread; keep the floor
    // strictly positive regardless.
    fit.model.sigma_floor = std::max(options.sigma_floor_fraction * resid_sd, 1e-12 * std::max(1.0, mean_nu));
    fit.model.validate();

    fit.residuals.assign(resid.data(), resid.data() + resid.size());
    return fit;
}

NuArModel fit_nu_ar(const MonthlyDeltaSeries& deltas, const NuArFitOptions& options) {
    return fit_nu_ar_detailed(deltas, options).model;
}

std::vector<double> simulate_delta_path(const NuArModel& model, YearMonth last_observed, double nu0,
                                        std::size_t horizon, RandomStream& rng) {
    std::vector<double> out(horizon);
    double nu = nu0;
    int t = last_observed.index();
    for (std::size_t k = 0; k < horizon; ++k, ++t) {
        const double z = rng.normal();
        nu = model.a * nu + model.drift(t) + model.sigma(t) * z;
        nu = std::max(nu, kNuFloor);
        out[k] = nu * nu;
    }
    return out;
}

DeltaSimulation simulate_delta_paths(const NuArModel& model, const DeltaSimulationRequest& request) {
    model.validate();
    if (request.path_count == 0) throw std::invalid_argument("simulate_delta_paths: path_count must be >= 1");
    if (!(request.nu0 > 0.0)) throw std::invalid_argument("simulate_delta_paths: nu0 must be > 0");
    for (double l : request.levels)
        if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("fan levels must lie in [0,1]");

    DeltaSimulation sim;
    sim.horizon = request.horizon_months;
    sim.paths.resize(request.path_count * request.horizon_months);
    for (std::size_t p = 0; p < request.path_count; ++p) {
        RandomStream rng(request.seed, p, rng_domain::delta_path);
        const auto path = simulate_delta_path(model, request.last_observed, request.nu0, request.horizon_months, rng);
        std::copy(path.begin(), path.end(), sim.paths.begin() + static_cast<std::ptrdiff_t>(p * sim.horizon));
    }

    auto& fan = sim.fan;
    fan.levels = request.levels;
    std::sort(fan.levels.begin(), fan.levels.end());
    fan.path_count = request.path_count;
    fan.values.reserve(sim.horizon * fan.levels.size());
    std::vector<double> column(request.path_count);
    YearMonth ym = request.last_observed;
    for (std::size_t k = 0; k < sim.horizon; ++k) {
        ym = ym.next();
        fan.months.push_back(ym);
        for (std::size_t p = 0; p < request.path_count; ++p) column[p] = sim.paths[p * sim.horizon + k];
        std::sort(column.begin(), column.end());
        for (double l : fan.levels) fan.values.push_back(quantile_sorted(column, l));
    }
    return sim;
}

}  // namespace acop
