#include "acop/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include <boost/math/special_functions/owens_t.hpp>

#include "acop/error.hpp"
#include "acop/special.hpp"
#include "acop/stats.hpp"

namespace acop {

void SimulationConfig::validate() const {
    if (horizon < 1) throw ConfigError("simulation horizon must be >= 1");
    if (path_count < 1) throw ConfigError("simulation path_count must be >= 1");
    if (x0 && !std::isfinite(*x0)) throw ConfigError("simulation x0 must be finite");
    for (double l : percentile_levels)
        if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("percentile levels must lie in [0,1]");
}

std::vector<Date> consecutive_dates(Date start, std::size_t count) {
    std::vector<Date> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = start + std::chrono::days{static_cast<int>(i)};
    return out;
}

namespace {

double open_unit(double v) {
    return std::clamp(v, std::numeric_limits<double>::min(), 1.0 - std::numeric_limits<double>::epsilon() / 2);
}

}  // namespace

std::vector<double> simulate_path(std::span<const Date> dates, double x0, ConditioningMode mode,
                                  const Autocopula& copula, const MarginalModel& marginal, RandomStream& rng) {
    std::vector<double> x(dates.size());
    if (dates.empty()) return x;
    x[0] = x0;
    double v = marginal.cdf(dates[0], x0);
    for (std::size_t t = 1; t < dates.size(); ++t) {
        const double u1 = copula.phi1(v);
        const double u2 = copula.sample_conditional(u1, rng.uniform(), mode);
        v = copula.phi2_inverse(u2);
        x[t] = marginal.quantile(dates[t], open_unit(v));
        if (!std::isfinite(x[t])) {
            throw NumericError("simulate_path: non-finite quantile at " + format_date(dates[t]));
        }
    }
    return x;
}

MonthlyPercentiles monthly_percentiles(std::span<const Date> dates, std::span<const double> values,
                                       std::size_t path_count, std::span<const double> levels) {
    MonthlyPercentiles out;
    out.levels.assign(levels.begin(), levels.end());
    std::sort(out.levels.begin(), out.levels.end());
    if (dates.empty()) return out;
    const std::size_t n = dates.size();
    std::size_t begin = 0;
    std::vector<double> pool;
    while (begin < n) {
        const YearMonth ym = year_month_of(dates[begin]);
        std::size_t end = begin;
        while (end < n && year_month_of(dates[end]) == ym) ++end;
        pool.clear();
        for (std::size_t p = 0; p < path_count; ++p)
            for (std::size_t t = begin; t < end; ++t) pool.push_back(values[p * n + t]);
        std::sort(pool.begin(), pool.end());
        out.months.push_back(ym);
        for (double l : out.levels) out.values.push_back(quantile_sorted(pool, l));
        begin = end;
    }
    return out;
}

namespace {

// Runs body(p) for every path, partitioned into contiguous chunks. The first
// failure (by path index) is rethrown after all workers finish.
template <class Body>
void for_each_path(std::size_t path_count, unsigned threads, Body&& body) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, path_count));
    std::vector<std::exception_ptr> errors(path_count);
    auto run = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t p = lo; p < hi; ++p) {
            try {
                body(p);
            } catch (...) {
                errors[p] = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        run(0, path_count);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (path_count + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(path_count, lo + chunk);
            if (lo < hi) pool.emplace_back(run, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

SimulationEnsemble make_ensemble(const SimulationConfig& cfg) {
    SimulationEnsemble ens;
    ens.dates = consecutive_dates(cfg.start, cfg.horizon);
    ens.path_count = cfg.path_count;
    ens.values.resize(cfg.path_count * cfg.horizon);
    return ens;
}

void finish(SimulationEnsemble& ens, const SimulationConfig& cfg) {
    ens.percentiles = monthly_percentiles(ens.dates, ens.values, ens.path_count, cfg.percentile_levels);
}

}  // namespace

SimulationEnsemble simulate_ensemble(const SimulationConfig& cfg, const Autocopula& copula,
                                     const MarginalModel& marginal) {
    cfg.validate();
    auto ens = make_ensemble(cfg);
    const double x0 = cfg.x0 ? *cfg.x0 : marginal.quantile(cfg.start, 0.5);
    for_each_path(cfg.path_count, cfg.threads, [&](std::size_t p) {
        RandomStream rng(cfg.seed, p, rng_domain::copula_path);
        const auto path = simulate_path(ens.dates, x0, cfg.conditioning, copula, marginal, rng);
        std::copy(path.begin(), path.end(), ens.values.begin() + static_cast<std::ptrdiff_t>(p * cfg.horizon));
    });
    finish(ens, cfg);
    return ens;
}

SimulationEnsemble simulate_ensemble(const SimulationConfig& cfg, const Autocopula& copula, const NigParams& shared,
                                     const MonthlyDeltaSeries& deltas, const NuArModel& nu_model) {
    if (cfg.delta_mode == DeltaMode::frozen) {
        const SeasonalNigMarginal marginal(shared, deltas, true);
        return simulate_ensemble(cfg, copula, marginal);
    }
    cfg.validate();
    nu_model.validate();
    if (deltas.empty()) throw ConfigError("simulated delta mode needs fitted monthly deltas");
    auto ens = make_ensemble(cfg);
    const YearMonth first = year_month_of(ens.dates.front());
    const YearMonth last = year_month_of(ens.dates.back());
    const YearMonth before = YearMonth::from_index(first.index() - 1);
    const auto months = static_cast<std::size_t>(last.index() - first.index() + 1);
    const auto clim = deltas.climatology();
    const double delta_before = deltas.delta_for(before).value_or(clim[before.month - 1]);
    const double nu0 = std::sqrt(delta_before);
    const SeasonalNigMarginal frozen(shared, deltas, true);
    const double x0 = cfg.x0 ? *cfg.x0 : frozen.quantile(cfg.start, 0.5);

    for_each_path(cfg.path_count, cfg.threads, [&](std::size_t p) {
        RandomStream delta_rng(cfg.seed, p, rng_domain::delta_path);
        const auto path_deltas = simulate_delta_path(nu_model, before, nu0, months, delta_rng);
        const SeasonalNigMarginal marginal(shared, first, path_deltas);
        RandomStream rng(cfg.seed, p, rng_domain::copula_path);
        const auto path = simulate_path(ens.dates, x0, cfg.conditioning, copula, marginal, rng);
        std::copy(path.begin(), path.end(), ens.values.begin() + static_cast<std::ptrdiff_t>(p * cfg.horizon));
    });
    finish(ens, cfg);
    return ens;
}

GaussianCopula::GaussianCopula(double rho) : rho_(rho) {
    if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("Gaussian copula: require |rho| < 1");
}

double GaussianCopula::evaluate(double u1, double u2) const {
    if (u1 <= 0.0 || u2 <= 0.0) return 0.0;
    if (u1 >= 1.0) return std::min(u2, 1.0);
    if (u2 >= 1.0) return u1;
    // Bivariate normal CDF via Owen's T.
    const double h = normal_quantile(u1);
    const double k = normal_quantile(u2);
    const double s = std::sqrt(1.0 - rho_ * rho_);
    if (h == 0.0 && k == 0.0) return 0.25 + std::asin(rho_) / (2.0 * std::numbers::pi);
    auto t_term = [&](double a, double b) {
        if (a == 0.0) return (b > 0.0 ? 0.25 : -0.25);
        return boost::math::owens_t(a, (b - rho_ * a) / (a * s));
    };
    double v = 0.5 * (u1 + u2) - t_term(h, k) - t_term(k, h);
    if (h * k < 0.0 || (h * k == 0.0 && h + k < 0.0)) v -= 0.5;
    return std::clamp(v, 0.0, std::min(u1, u2));
}

double GaussianCopula::sample_conditional(double u1, double uniform, ConditioningMode mode) const {
    if (mode != ConditioningMode::partial) {
        throw ConfigError("Gaussian copula supports partial conditioning only");
    }
    const double z1 = normal_quantile(open_unit(u1));
    const double z = normal_quantile(uniform);
    return normal_cdf(rho_ * z1 + std::sqrt(1.0 - rho_ * rho_) * z);
}

void Ar1Spec::validate() const {
    if (!(std::abs(alpha) < 1.0)) throw std::invalid_argument("AR(1): require |alpha| < 1");
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(beta)) {
        throw std::invalid_argument("AR(1): require sigma > 0 and finite beta");
    }
}

Ar1OracleResult ar1_gaussian_copula_oracle(const Ar1Spec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    Ar1OracleResult out;
    const double mean = spec.stationary_mean();
    const double sd = std::sqrt(spec.stationary_variance());

    RandomStream direct_rng(seed, 0, rng_domain::oracle);
    out.direct.resize(n);
    if (n > 0) {
        double y = mean + sd * direct_rng.normal();
        out.direct[0] = y;
        for (std::size_t t = 1; t < n; ++t) {
            y = spec.alpha * y + spec.beta + spec.sigma * direct_rng.normal();
            out.direct[t] = y;
        }
    }

    RandomStream rng(seed, 1, rng_domain::oracle);
    const NormalMarginal marginal(mean, sd);
    const GaussianCopula copula(spec.alpha);
    const double x0 = mean + sd * rng.normal();
    const auto dates = consecutive_dates(Date{std::chrono::days{0}}, n);
    out.framework = simulate_path(dates, x0, ConditioningMode::partial, copula, marginal, rng);
    return out;
}

TailBands tail_dependence_bands(const SimulationEnsemble& ensemble, const MarginalModel& marginal,
                                std::span<const double> grid, double lo_level, double hi_level) {
    if (ensemble.path_count < kMinBandPaths) {
        throw std::invalid_argument("tail_dependence_bands: need at least " + std::to_string(kMinBandPaths) +
                                    " paths, got " + std::to_string(ensemble.path_count));
    }
    const std::size_t g = grid.size();
    std::vector<double> lower(ensemble.path_count * g);
    std::vector<double> upper(ensemble.path_count * g);
    std::vector<double> v(ensemble.horizon());
    for (std::size_t p = 0; p < ensemble.path_count; ++p) {
        const auto path = ensemble.path(p);
        for (std::size_t t = 0; t < path.size(); ++t) {
            v[t] = std::clamp(marginal.cdf(ensemble.dates[t], path[t]), kPitClamp, 1.0 - kPitClamp);
        }
        const auto curves = tail_dependence_curves(lag_pairs(v), grid);
        std::copy(curves.lower.begin(), curves.lower.end(), lower.begin() + static_cast<std::ptrdiff_t>(p * g));
        std::copy(curves.upper.begin(), curves.upper.end(), upper.begin() + static_cast<std::ptrdiff_t>(p * g));
    }
    TailBands bands;
    bands.grid.assign(grid.begin(), grid.end());
    std::vector<double> column(ensemble.path_count);
    auto summarise = [&](const std::vector<double>& src, std::vector<double>& lo, std::vector<double>& mid,
                         std::vector<double>& hi) {
        for (std::size_t k = 0; k < g; ++k) {
            for (std::size_t p = 0; p < ensemble.path_count; ++p) column[p] = src[p * g + k];
            std::sort(column.begin(), column.end());
            lo.push_back(quantile_sorted(column, lo_level));
            mid.push_back(quantile_sorted(column, 0.5));
            hi.push_back(quantile_sorted(column, hi_level));
        }
    };
    summarise(lower, bands.lower_lo, bands.lower_mid, bands.lower_hi);
    summarise(upper, bands.upper_lo, bands.upper_mid, bands.upper_hi);
    return bands;
}

BandCoverage band_coverage(const TailBands& bands, const TailCurves& curves) {
    if (bands.grid != curves.grid) throw std::invalid_argument("band_coverage: grids differ");
    const std::size_t g = bands.grid.size();
    if (g == 0) return {};
    std::size_t lo_in = 0;
    std::size_t up_in = 0;
    for (std::size_t k = 0; k < g; ++k) {
        if (curves.lower[k] >= bands.lower_lo[k] && curves.lower[k] <= bands.lower_hi[k]) ++lo_in;
        if (curves.upper[k] >= bands.upper_lo[k] && curves.upper[k] <= bands.upper_hi[k]) ++up_in;
    }
    return {static_cast<double>(lo_in) / static_cast<double>(g), static_cast<double>(up_in) / static_cast<double>(g)};
}

}  // namespace acop
