#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "acop/autocopula.hpp"
#include "acop/error.hpp"
#include "acop/marginal.hpp"
#include "acop/rng.hpp"
#include "acop/simulator.hpp"

using namespace acop;

namespace {

const Date kStart = parse_date("2021-01-01");

double mean_of(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

double var_of(std::span<const double> x) {
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / x.size();
}

double lag1(std::span<const double> x) {
    const double m = mean_of(x);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        den += (x[i] - m) * (x[i] - m);
        if (i > 0) num += (x[i] - m) * (x[i - 1] - m);
    }
    return num / den;
}

double ks_uniform(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) d = std::max({d, (i + 1) / n - v[i], v[i] - i / n});
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

// Bivariate normal CDF by one-dimensional quadrature.
double binormal_copula(double rho, double u1, double u2) {
    const boost::math::normal N;
    const double a = boost::math::quantile(N, u1), b = boost::math::quantile(N, u2);
    const double s = std::sqrt(1 - rho * rho);
    auto f = [&](double z) { return boost::math::pdf(N, z) * boost::math::cdf(N, (b - rho * z) / s); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -40.0, a, 15, 1e-14);
}

std::vector<PitPair> gaussian_pairs(std::size_t n, double rho, std::uint64_t seed) {
    RandomStream r(seed, 0, rng_domain::oracle);
    const boost::math::normal N;
    std::vector<PitPair> out(n);
    for (auto& p : out) {
        const double z1 = r.normal();
        p.prev = boost::math::cdf(N, z1);
        p.next = boost::math::cdf(N, rho * z1 + std::sqrt(1 - rho * rho) * r.normal());
    }
    return out;
}

class FailingMarginal final : public MarginalModel {
public:
    explicit FailingMarginal(Date bad) : bad_(bad) {}
    [[nodiscard]] double cdf(Date, double x) const override { return 1.0 / (1.0 + std::exp(-x)); }
    [[nodiscard]] double quantile(Date d, double q) const override {
        if (d >= bad_) throw NumericError("quantile failed at " + format_date(d));
        return std::log(q / (1 - q));
    }

private:
    Date bad_;
};

SimulationConfig config(std::size_t horizon, std::size_t paths, std::uint64_t seed) {
    SimulationConfig c;
    c.start = kStart;
    c.horizon = horizon;
    c.path_count = paths;
    c.seed = seed;
    c.threads = 1;
    return c;
}

}  // namespace

TEST_CASE("independence copula gives uncorrelated draws") {
    const auto dates = consecutive_dates(kStart, 100000);
    RandomStream r(1, 0, rng_domain::copula_path);
    const NormalMarginal m(2.0, 3.0);
    const auto x = simulate_path(dates, 2.0, ConditioningMode::cumulative, IndependenceCopula{}, m, r);
    REQUIRE(x.size() == 100000);
    CHECK(x[0] == 2.0);
    CHECK(std::abs(lag1(x)) < 0.01);
    // Marginal consistency: PIT values are uniform.
    std::vector<double> v;
    for (double xi : x) v.push_back(m.cdf(kStart, xi));
    CHECK(ks_uniform(v) * std::sqrt(double(v.size())) < 1.628);
}

TEST_CASE("comonotone cumulative conditioning draws u2 = U u1") {
    const NormalMarginal m(0.0, 1.0);
    const auto dates = consecutive_dates(kStart, 2);
    std::vector<double> ratio;
    for (std::uint64_t p = 0; p < 5000; ++p) {
        RandomStream r(2, p, rng_domain::copula_path);
        const auto x = simulate_path(dates, 0.0, ConditioningMode::cumulative, ComonotoneCopula{}, m, r);
        ratio.push_back(m.cdf(kStart, x[1]) / 0.5);
    }
    for (double q : ratio) CHECK(q <= 1.0 + 1e-12);
    CHECK(ks_uniform(ratio) * std::sqrt(5000.0) < 1.628);

    // Partial conditioning stays on the diagonal.
    RandomStream r(3, 0, rng_domain::copula_path);
    const auto x = simulate_path(consecutive_dates(kStart, 10), 0.7, ConditioningMode::partial, ComonotoneCopula{}, m, r);
    for (double xi : x) CHECK(xi == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("simulate_path is deterministic given the stream") {
    const auto dates = consecutive_dates(kStart, 500);
    const NormalMarginal m(0.0, 1.0);
    const GaussianCopula g(0.5);
    RandomStream a(9, 4, rng_domain::copula_path), b(9, 4, rng_domain::copula_path);
    CHECK(simulate_path(dates, 0.1, ConditioningMode::partial, g, m, a) ==
          simulate_path(dates, 0.1, ConditioningMode::partial, g, m, b));
}

TEST_CASE("Gaussian copula evaluation and conditioning") {
    const GaussianCopula g(0.6);
    for (double u1 : {0.05, 0.3, 0.5, 0.9})
        for (double u2 : {0.1, 0.5, 0.95}) CHECK(std::abs(g.evaluate(u1, u2) - binormal_copula(0.6, u1, u2)) < 1e-9);
    CHECK(g.evaluate(0.4, 1.0) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(g.evaluate(0.0, 0.4) == 0.0);
    CHECK_THROWS_AS((void)g.sample_conditional(0.5, 0.5, ConditioningMode::cumulative), ConfigError);
    CHECK_THROWS_AS(GaussianCopula(1.0), std::invalid_argument);
}

TEST_CASE("AR(1) oracle: framework series matches the direct recursion") {
    const std::size_t n = 100000;
    for (double alpha : {0.0, 0.4, 0.8}) {
        CAPTURE(alpha);
        const Ar1Spec spec{alpha, 0.5, 1.3};
        const auto res = ar1_gaussian_copula_oracle(spec, n, 77);
        REQUIRE(res.direct.size() == n);
        REQUIRE(res.framework.size() == n);
        const double r_direct = lag1(res.direct);
        const double r_frame = lag1(res.framework);
        CHECK(std::abs(r_direct - r_frame) < 0.02);
        CHECK(std::abs(r_frame - alpha) < 0.02);
        CHECK(std::abs(r_direct - alpha) < 0.02);
        // Standard errors under AR(1) autocorrelation.
        const double var = spec.stationary_variance();
        const double se_mean = std::sqrt(var * (1 + alpha) / (1 - alpha) / n);
        const double se_var = var * std::sqrt(2 * (1 + alpha * alpha) / (1 - alpha * alpha) / n);
        for (const auto* s : {&res.direct, &res.framework}) {
            CHECK(std::abs(mean_of(*s) - spec.stationary_mean()) < 3 * se_mean);
            CHECK(std::abs(var_of(*s) - var) < 3 * se_var);
        }
        if (alpha == 0.0) CHECK(ks_two_sample(res.direct, res.framework) * std::sqrt(n / 2.0) < 1.628);
    }
}

TEST_CASE("ensemble with one path: percentiles are its order statistics") {
    auto cfg = config(90, 1, 5);
    cfg.percentile_levels = {0.0, 0.5, 1.0};
    const NormalMarginal m(0.0, 1.0);
    cfg.conditioning = ConditioningMode::partial;
    const auto e2 = simulate_ensemble(cfg, GaussianCopula(0.3), m);
    REQUIRE(e2.percentiles.months.size() == 3);
    std::size_t day = 0;
    for (std::size_t mo = 0; mo < 3; ++mo) {
        std::vector<double> v;
        while (day < e2.dates.size() && year_month_of(e2.dates[day]) == e2.percentiles.months[mo]) v.push_back(e2.values[day++]);
        std::sort(v.begin(), v.end());
        CHECK(e2.percentiles.value(mo, 0) == v.front());
        CHECK(e2.percentiles.value(mo, 2) == v.back());
        if (v.size() % 2 == 1) CHECK(e2.percentiles.value(mo, 1) == v[v.size() / 2]);
    }
}

TEST_CASE("ensemble with a constant marginal") {
    auto cfg = config(40, 7, 6);
    const auto ens = simulate_ensemble(cfg, IndependenceCopula{}, ConstantMarginal(3.25));
    for (double v : ens.values) CHECK(v == 3.25);
    for (double v : ens.percentiles.values) CHECK(v == 3.25);
}

TEST_CASE("ensemble does not depend on the thread count") {
    const EmpiricalAutocopula c(build_partition(gaussian_pairs(4000, 0.5, 3), 16));
    const StaticNigMarginal m(NigParams(0.0, 1.2, 0.3, 1.0));
    auto cfg = config(200, 13, 8);
    cfg.threads = 1;
    const auto a = simulate_ensemble(cfg, c, m);
    cfg.threads = 3;
    const auto b = simulate_ensemble(cfg, c, m);
    CHECK(a.values == b.values);
    CHECK(a.percentiles.values == b.percentiles.values);
    // Path p only depends on (seed, p).
    cfg.path_count = 5;
    const auto head = simulate_ensemble(cfg, c, m);
    CHECK(std::equal(head.values.begin(), head.values.end(), a.values.begin()));
    for (std::size_t mo = 0; mo < a.percentiles.months.size(); ++mo)
        for (std::size_t l = 1; l < a.percentiles.levels.size(); ++l)
            CHECK(a.percentiles.value(mo, l) >= a.percentiles.value(mo, l - 1));
}

TEST_CASE("errors inside paths propagate") {
    auto cfg = config(30, 6, 9);
    cfg.x0 = 0.0;
    cfg.threads = 2;
    const FailingMarginal bad(kStart + std::chrono::days(10));
    CHECK_THROWS_AS(simulate_ensemble(cfg, IndependenceCopula{}, bad), NumericError);
    cfg.horizon = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("default x0 is the marginal median") {
    auto cfg = config(5, 1, 10);
    const StaticNigMarginal m(NigParams(0.4, 1.5, 0.7, 0.8));
    const auto ens = simulate_ensemble(cfg, IndependenceCopula{}, m);
    CHECK(ens.values[0] == m.quantile(kStart, 0.5));
}

TEST_CASE("seasonal ensemble: frozen and simulated delta") {
    const NigParams shared(0.0, 1.2, 0.3, 1.0);
    std::vector<MonthlyDelta> e;
    for (int k = 0; k < 48; ++k) e.push_back({YearMonth::from_index(2017 * 12 + k), 1.0 + 0.5 * std::cos(k * 0.5236)});
    const MonthlyDeltaSeries deltas(e);
    const auto nu = fit_nu_ar(deltas);
    const EmpiricalAutocopula c(build_partition(gaussian_pairs(4000, 0.5, 4), 16));
    auto cfg = config(120, 30, 11);
    cfg.conditioning = ConditioningMode::partial;
    cfg.delta_mode = DeltaMode::frozen;
    const auto frozen = simulate_ensemble(cfg, c, shared, deltas, nu);
    cfg.delta_mode = DeltaMode::simulated;
    const auto sim = simulate_ensemble(cfg, c, shared, deltas, nu);
    CHECK(frozen.values.size() == 30 * 120);
    CHECK(sim.values.size() == 30 * 120);
    CHECK(frozen.values != sim.values);
    // Same copula draws: v paths coincide, so the x0 column agrees.
    for (std::size_t p = 0; p < 30; ++p) CHECK(frozen.path(p)[0] == sim.path(p)[0]);
    const auto again = simulate_ensemble(cfg, c, shared, deltas, nu);
    CHECK(again.values == sim.values);
}

TEST_CASE("tail bands: identical paths give zero width") {
    SimulationEnsemble ens;
    ens.dates = consecutive_dates(kStart, 400);
    ens.path_count = 25;
    RandomStream r(12, 0, rng_domain::oracle);
    std::vector<double> one(400);
    for (auto& v : one) v = r.normal();
    for (std::size_t p = 0; p < 25; ++p) ens.values.insert(ens.values.end(), one.begin(), one.end());
    const auto grid = probability_grid(0.1, 0.9, 0.1);
    const auto b = tail_dependence_bands(ens, NormalMarginal(0, 1), grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(b.lower_lo[i] == b.lower_hi[i]);
        CHECK(b.upper_lo[i] == b.upper_hi[i]);
    }
    ens.path_count = 19;
    ens.values.resize(19 * 400);
    CHECK_THROWS_AS(tail_dependence_bands(ens, NormalMarginal(0, 1), grid), std::invalid_argument);
}

TEST_CASE("tail bands of an independence ensemble bracket the closed form") {
    auto cfg = config(1500, 100, 13);
    const NormalMarginal m(0, 1);
    const auto ens = simulate_ensemble(cfg, IndependenceCopula{}, m);
    const auto grid = probability_grid(0.05, 0.95, 0.05);
    const auto b = tail_dependence_bands(ens, m, grid);
    TailCurves truth{grid, grid, {}};
    for (double u : grid) truth.upper.push_back(1.0 - u);
    const auto cov = band_coverage(b, truth);
    CHECK(cov.lower >= 0.9);
    CHECK(cov.upper >= 0.9);
}

TEST_CASE("self-consistency: re-estimated copula of a long simulated path") {
    const EmpiricalAutocopula gen(build_partition(gaussian_pairs(20000, 0.6, 14), 32));
    const NormalMarginal m(0, 1);
    const auto dates = consecutive_dates(kStart, 100001);
    auto worst_for = [&](ConditioningMode mode) {
        RandomStream r(15, 0, rng_domain::copula_path);
        const auto x = simulate_path(dates, 0.0, mode, gen, m, r);
        std::vector<double> v;
        for (double xi : x) v.push_back(m.cdf(kStart, xi));
        const auto pairs = lag_pairs(v);
        const EmpiricalAutocopula est(build_partition(pairs, default_target_per_rect(pairs.size())));
        double worst = 0.0;
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) worst = std::max(worst, std::abs(est.evaluate(i / 20.0, j / 20.0) - gen.evaluate(i / 20.0, j / 20.0)));
        return worst;
    };
    CHECK(worst_for(ConditioningMode::partial) <= 0.03);
    MESSAGE("cumulative conditioning max |C_est - C_gen| = " << worst_for(ConditioningMode::cumulative));
}
