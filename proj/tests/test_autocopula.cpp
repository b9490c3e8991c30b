#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "acop/autocopula.hpp"
#include "acop/error.hpp"
#include "acop/marginal.hpp"
#include "acop/nig.hpp"
#include "acop/rng.hpp"
#include "acop/simulator.hpp"

using namespace acop;

namespace {

std::vector<PitPair> uniform_pairs(std::size_t n, std::uint64_t seed) {
    RandomStream r(seed, 0, rng_domain::oracle);
    std::vector<PitPair> out(n);
    for (auto& p : out) {
        p.prev = r.uniform();
        p.next = r.uniform();
    }
    return out;
}

std::vector<PitPair> gaussian_pairs(std::size_t n, double rho, std::uint64_t seed) {
    RandomStream r(seed, 0, rng_domain::oracle);
    const boost::math::normal N;
    std::vector<PitPair> out(n);
    for (auto& p : out) {
        const double z1 = r.normal();
        const double z2 = rho * z1 + std::sqrt(1 - rho * rho) * r.normal();
        p.prev = boost::math::cdf(N, z1);
        p.next = boost::math::cdf(N, z2);
    }
    return out;
}

RectPartition quadrants(std::size_t ll, std::size_t lr, std::size_t ul, std::size_t ur) {
    // lower/upper refers to u2, left/right to u1.
    return RectPartition({{0, 0.5, 0, 0.5, ll}, {0.5, 1, 0, 0.5, lr}, {0, 0.5, 0.5, 1, ul}, {0.5, 1, 0.5, 1, ur}},
                         ll + lr + ul + ur);
}

// Phi by direct summation over the leaves.
double brute_phi(const RectPartition& p, double x, double y) {
    double s = 0.0;
    for (const auto& r : p.rects()) {
        const double wx = std::clamp(x, r.u1_lo, r.u1_hi) - r.u1_lo;
        const double wy = std::clamp(y, r.u2_lo, r.u2_hi) - r.u2_lo;
        s += static_cast<double>(r.count) * wx * wy / r.area();
    }
    return s / static_cast<double>(p.total_count());
}

double c_measure(const Autocopula& c, double a1, double b1, double a2, double b2) {
    return c.evaluate(b1, b2) - c.evaluate(a1, b2) - c.evaluate(b1, a2) + c.evaluate(a1, a2);
}

double ks_uniform(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        d = std::max({d, (i + 1) / n - v[i], v[i] - i / n});
    }
    return d;
}

// Integral of 1 - f over [0,1] for piecewise-linear f: the conditional mean.
double conditional_mean(const PiecewiseLinear& f) {
    double s = 0.0;
    for (std::size_t k = 1; k < f.x.size(); ++k) s += (f.x[k] - f.x[k - 1]) * (1.0 - 0.5 * (f.y[k] + f.y[k - 1]));
    return s;
}

}  // namespace

TEST_CASE("pit_transform: symmetric law at its centre gives one half") {
    const StaticNigMarginal m(NigParams(0.7, 1.5, 0.0, 2.0));
    const Date d = parse_date("2020-01-01");
    const auto pit = pit_transform(ObservationSeries({{d, 0.7}, {d + std::chrono::days(1), 0.7}}), m);
    CHECK(pit.values[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pit.dates[1] == d + std::chrono::days(1));
}

TEST_CASE("pit_transform: monotone and clamped") {
    const StaticNigMarginal m(NigParams(0.0, 1.0, 0.2, 1.0));
    const Date d = parse_date("2020-01-01");
    std::vector<Observation> obs;
    for (int i = 0; i < 50; ++i) obs.push_back({d + std::chrono::days(i), -30.0 + 1.2 * i});
    const auto pit = pit_transform(ObservationSeries(obs), m);
    for (std::size_t i = 1; i < pit.values.size(); ++i) CHECK(pit.values[i] >= pit.values[i - 1]);
    for (double v : pit.values) {
        CHECK(v >= kPitClamp);
        CHECK(v <= 1.0 - kPitClamp);
    }
    CHECK(pit.values.front() == kPitClamp);
    CHECK(pit.values.back() == 1.0 - kPitClamp);
    // Strict on the interior.
    const auto mid = pit_transform(ObservationSeries({{d, -0.1}, {d + std::chrono::days(1), 0.1}}), m);
    CHECK(mid.values[0] < mid.values[1]);
}

TEST_CASE("pit_transform: draws from the marginal are uniform") {
    const NigParams shared(0.1, 1.4, -0.4, 1.0);
    std::vector<double> deltas;
    for (int k = 0; k < 24; ++k) deltas.push_back(1.0 + 0.8 * std::sin(k));
    const SeasonalNigMarginal m(shared, YearMonth{2000, 1}, deltas, std::nullopt);
    RandomStream r(3, 0, rng_domain::oracle);
    const Date d0 = parse_date("2000-01-01");
    // Two years of daily draws, delta changing monthly.
    std::vector<Observation> uniq;
    for (int i = 0; i < 5000; ++i) {
        const Date d = d0 + std::chrono::days(i);
        if (year_month_of(d) > YearMonth{2001, 12}) break;
        uniq.push_back({d, m.quantile(d, r.uniform())});
    }
    REQUIRE(uniq.size() == 731);
    const auto pit = pit_transform(ObservationSeries(uniq), m);
    CHECK(ks_uniform(pit.values) * std::sqrt(731.0) < 1.628);  // 1% critical value

    // n = 5000 on a single static law.
    const StaticNigMarginal st(shared);
    std::vector<Observation> big;
    for (int i = 0; i < 5000; ++i) big.push_back({d0 + std::chrono::days(i), st.quantile(d0, r.uniform())});
    const auto pit2 = pit_transform(ObservationSeries(big), st);
    CHECK(ks_uniform(pit2.values) * std::sqrt(5000.0) < 1.628);
}

TEST_CASE("pit_transform inverts the quantile") {
    const StaticNigMarginal m(NigParams(-0.3, 2.0, 0.9, 0.7));
    const Date d = parse_date("2020-01-01");
    std::vector<Observation> obs;
    std::vector<double> qs;
    for (int i = 1; i < 1000; ++i) {
        qs.push_back(i / 1000.0);
        obs.push_back({d + std::chrono::days(i), m.quantile(d, i / 1000.0)});
    }
    const auto pit = pit_transform(ObservationSeries(obs), m);
    for (std::size_t i = 0; i < qs.size(); ++i) CHECK(std::abs(pit.values[i] - qs[i]) < 1e-6);
}

TEST_CASE("pit_transform: missing month propagates") {
    const SeasonalNigMarginal m(NigParams(0, 1, 0, 1), YearMonth{2020, 1}, std::vector<double>{1.0}, std::nullopt);
    CHECK_THROWS_AS(pit_transform(ObservationSeries({{parse_date("2020-02-01"), 0.0}}), m), DataError);
}

TEST_CASE("lag_pairs pairs consecutive days only") {
    const Date d = parse_date("2020-01-01");
    PitSeries s{{d, d + std::chrono::days(1), d + std::chrono::days(3), d + std::chrono::days(4)}, {0.1, 0.2, 0.3, 0.4}};
    const auto p = lag_pairs(s);
    REQUIRE(p.size() == 2);
    CHECK(p[0].prev == 0.1);
    CHECK(p[0].next == 0.2);
    CHECK(p[1].prev == 0.3);
    const std::vector<double> v{0.5, 0.6, 0.7};
    CHECK(lag_pairs(v).size() == 2);
}

TEST_CASE("build_partition: quadrant centres with target one") {
    const std::vector<PitPair> pts{{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
    const auto p = build_partition(pts, 1);
    REQUIRE(p.size() == 4);
    for (const auto& r : p.rects()) {
        CHECK(r.count == 1);
        // Tied coordinates are spread by 1e-12 before splitting.
        CHECK(std::abs(r.area() - 0.25) < 1e-12);
        CHECK((r.u1_lo == 0.0 || std::abs(r.u1_lo - 0.5) < 1e-12));
        CHECK((r.u2_lo == 0.0 || std::abs(r.u2_lo - 0.5) < 1e-12));
    }
}

TEST_CASE("build_partition: 4096 uniform pairs, target 64") {
    const auto pairs = uniform_pairs(4096, 31);
    const auto p = build_partition(pairs, 64);
    CHECK(p.size() == 64);
    for (const auto& r : p.rects()) {
        CHECK(r.count >= 32);
        CHECK(r.count <= 64);
    }
}

TEST_CASE("build_partition: tiling and balance over random sizes") {
    RandomStream r(32, 0, rng_domain::oracle);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t target = 1 + static_cast<std::size_t>(r.uniform() * 60);
        const std::size_t n = 4 * target + static_cast<std::size_t>(r.uniform() * 3000);
        const auto pairs = gaussian_pairs(n, 2 * r.uniform() - 1, 100 + rep);
        const auto p = build_partition(pairs, target);
        double area = 0.0;
        std::size_t lo = n, hi = 0, sum = 0;
        for (const auto& q : p.rects()) {
            area += q.area();
            lo = std::min(lo, q.count);
            hi = std::max(hi, q.count);
            sum += q.count;
            CHECK(q.count <= target);
        }
        CHECK(std::abs(area - 1.0) < 1e-12);
        CHECK(sum == n);
        CHECK(p.total_count() == n);
        CHECK(hi <= 2 * lo);
        // Points fall in the leaf that counts them.
        for (const auto& q : p.rects()) {
            std::size_t inside = 0;
            for (const auto& pt : pairs) {
                const bool in1 = pt.prev >= q.u1_lo && (pt.prev < q.u1_hi || q.u1_hi == 1.0);
                const bool in2 = pt.next >= q.u2_lo && (pt.next < q.u2_hi || q.u2_hi == 1.0);
                inside += (in1 && in2) ? 1 : 0;
            }
            CHECK(inside == q.count);
        }
        // Disjoint interiors.
        for (std::size_t i = 0; i < p.size(); ++i)
            for (std::size_t j = i + 1; j < p.size(); ++j) {
                const auto& a = p.rects()[i];
                const auto& b = p.rects()[j];
                const double ox = std::min(a.u1_hi, b.u1_hi) - std::max(a.u1_lo, b.u1_lo);
                const double oy = std::min(a.u2_hi, b.u2_hi) - std::max(a.u2_lo, b.u2_lo);
                CHECK_FALSE((ox > 0.0 && oy > 0.0));
            }
    }
}

TEST_CASE("build_partition: ties and errors") {
    std::vector<PitPair> tied(64, PitPair{0.5, 0.5});
    for (std::size_t i = 0; i < 32; ++i) tied[i] = {0.3, 0.6};
    const auto p = build_partition(tied, 8);
    std::size_t sum = 0;
    for (const auto& r : p.rects()) sum += r.count;
    CHECK(sum == 64);
    CHECK_NOTHROW(EmpiricalAutocopula{p});

    CHECK_THROWS_AS(build_partition(uniform_pairs(31, 1), 8), DataError);
    CHECK_THROWS_AS(build_partition(std::vector<PitPair>{{0.1, 1.5}, {0.2, 0.3}, {0.3, 0.3}, {0.4, 0.4}}, 1), DataError);
    CHECK(default_target_per_rect(1000) == 32);
    CHECK(default_target_per_rect(50000) == 196);
}

TEST_CASE("joint CDF: single rectangle is xy") {
    const EmpiricalAutocopula c(RectPartition({{0, 1, 0, 1, 7}}, 7));
    for (double x : {0.0, 0.1, 0.37, 0.5, 0.99, 1.0})
        for (double y : {0.0, 0.2, 0.5, 0.81, 1.0}) CHECK(c.phi(x, y) == doctest::Approx(x * y).epsilon(1e-15));
    CHECK(c.phi(1, 1) == 1.0);
}

TEST_CASE("joint CDF: quadrant counts (2,1,1,2)") {
    const EmpiricalAutocopula c(quadrants(2, 1, 1, 2));
    CHECK(c.phi(0.5, 0.5) == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
    CHECK(c.phi(1, 1) == 1.0);
    CHECK(c.phi(0.5, 1) + (1 - c.phi(0.5, 1)) == 1.0);
    CHECK(c.phi(0, 0.4) == 0.0);
    CHECK(c.phi(0.4, 0) == 0.0);
    // C(0.5, u)/0.5 at u = 0.5: both margins are uniform at 0.5.
    CHECK(c.phi1(0.5) == doctest::Approx(0.5));
    CHECK(c.conditional_cdf(0.5)(0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("joint CDF matches direct summation") {
    RandomStream r(40, 0, rng_domain::oracle);
    const auto p = build_partition(gaussian_pairs(3000, 0.7, 41), 20);
    const EmpiricalAutocopula c(p);
    for (int k = 0; k < 2000; ++k) {
        const double x = r.uniform(), y = r.uniform();
        CHECK(std::abs(c.phi(x, y) - brute_phi(p, x, y)) < 1e-12);
    }
    for (std::size_t i = 0; i < c.x_edges().size(); ++i) CHECK(c.p1_knots()[i] == doctest::Approx(brute_phi(p, c.x_edges()[i], 1.0)).epsilon(1e-13));
}

TEST_CASE("copula axioms on constructed copulas") {
    for (std::uint64_t seed : {50u, 51u, 52u}) {
        const double rho = seed == 50 ? 0.0 : (seed == 51 ? 0.8 : -0.5);
        const auto p = build_partition(gaussian_pairs(5000, rho, seed), 16);
        const EmpiricalAutocopula c(p);
        for (double u : {0.0, 0.25, 0.7, 1.0}) {
            CHECK(std::abs(c.evaluate(u, 1.0) - u) <= 1e-12);
            CHECK(std::abs(c.evaluate(1.0, u) - u) <= 1e-12);
            CHECK(c.evaluate(u, 0.0) == 0.0);
            CHECK(c.evaluate(0.0, u) == 0.0);
        }
        RandomStream r(seed, 1, rng_domain::oracle);
        for (int k = 0; k < 500; ++k) {
            const double u = r.uniform();
            CHECK(std::abs(c.evaluate(u, 1.0) - u) <= 1e-12);
            CHECK(std::abs(c.evaluate(1.0, u) - u) <= 1e-12);
        }
        // 2-increasing on every refined-grid cell.
        const auto p1 = c.p1_knots();
        const auto p2 = c.p2_knots();
        std::size_t negative = 0;
        for (std::size_t i = 1; i < p1.size(); ++i)
            for (std::size_t j = 1; j < p2.size(); ++j) {
                if (c_measure(c, p1[i - 1], p1[i], p2[j - 1], p2[j]) < 0.0) ++negative;
            }
        CHECK(negative == 0);
        // Grounding: each leaf carries count / total.
        for (const auto& q : p.rects()) {
            const double m = c_measure(c, c.phi1(q.u1_lo), c.phi1(q.u1_hi), c.phi2(q.u2_lo), c.phi2(q.u2_hi));
            CHECK(std::abs(m - static_cast<double>(q.count) / p.total_count()) < 1e-10);
        }
    }
}

TEST_CASE("copula from independent pairs is close to the product") {
    const auto pairs = uniform_pairs(50000, 60);
    const EmpiricalAutocopula c(build_partition(pairs, default_target_per_rect(pairs.size())));
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) worst = std::max(worst, std::abs(c.evaluate(i / 20.0, j / 20.0) - i * j / 400.0));
    CHECK(worst <= 0.02);
}

TEST_CASE("conditional cdf: single rectangle gives the identity") {
    const EmpiricalAutocopula c(RectPartition({{0, 1, 0, 1, 4}}, 4));
    for (double u1 : {0.1, 0.5, 1.0}) {
        const auto f = c.conditional_cdf(u1);
        const auto g = c.conditional_partial_cdf(u1);
        for (double u : {0.0, 0.3, 0.77, 1.0}) {
            CHECK(f(u) == doctest::Approx(u).epsilon(1e-14));
            CHECK(g(u) == doctest::Approx(u).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS((void)c.conditional_cdf(0.0), DomainError);
    CHECK_THROWS_AS((void)c.conditional_cdf(1.5), DomainError);
}

TEST_CASE("conditional cdf: comonotone closed form") {
    const ComonotoneCopula m;
    RandomStream r(70, 0, rng_domain::oracle);
    for (int k = 0; k < 200; ++k) {
        const double u1 = r.uniform(), U = r.uniform();
        // C(u1, u)/u1 = min(u, u1)/u1, inverse at U is U u1.
        const double u2 = m.sample_conditional(u1, U, ConditioningMode::cumulative);
        CHECK(std::min(u2, u1) / u1 == doctest::Approx(U).epsilon(1e-14));
        CHECK(m.evaluate(u1, u2) / u1 == doctest::Approx(U).epsilon(1e-14));
    }
}

TEST_CASE("conditional cdfs: endpoints, monotonicity and sampling agree") {
    const EmpiricalAutocopula c(build_partition(gaussian_pairs(8000, 0.6, 80), 24));
    RandomStream r(81, 0, rng_domain::oracle);
    for (int k = 0; k < 100; ++k) {
        const double u1 = std::max(1e-6, r.uniform());
        const auto f = c.conditional_cdf(u1);
        const auto g = c.conditional_partial_cdf(u1);
        CHECK(f(0.0) == 0.0);
        CHECK(f(1.0) == 1.0);
        CHECK(g(0.0) == 0.0);
        CHECK(g(1.0) == 1.0);
        double pf = 0.0, pg = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double u = i / 1000.0;
            CHECK(f(u) >= pf);
            CHECK(g(u) >= pg);
            pf = f(u);
            pg = g(u);
        }
        for (int s = 0; s < 5; ++s) {
            const double U = r.uniform();
            CHECK(std::abs(c.sample_conditional(u1, U, ConditioningMode::cumulative) - inverse_conditional(f, U)) < 1e-12);
            CHECK(std::abs(c.sample_conditional(u1, U, ConditioningMode::partial) - inverse_conditional(g, U)) < 1e-12);
        }
    }
}

TEST_CASE("partial conditional matches a central difference") {
    const EmpiricalAutocopula c(build_partition(gaussian_pairs(6000, 0.5, 90), 24));
    const auto p1 = c.p1_knots();
    RandomStream r(91, 0, rng_domain::oracle);
    const double h = 1e-6;
    int checked = 0;
    while (checked < 300) {
        const double u1 = 0.01 + 0.98 * r.uniform();
        const double u = r.uniform();
        const auto it = std::lower_bound(p1.begin(), p1.end(), u1);
        const double gap = std::min(std::abs(*it - u1), std::abs(*(it - 1) - u1));
        if (gap < 10 * h) continue;
        const double fd = (c.evaluate(u1 + h, u) - c.evaluate(u1 - h, u)) / (2 * h);
        CHECK(std::abs(c.conditional_partial_cdf(u1)(u) - fd) < 1e-4);
        ++checked;
    }
}

TEST_CASE("partial conditional mean rises with positive dependence") {
    const EmpiricalAutocopula c(build_partition(gaussian_pairs(20000, 0.6, 95), 40));
    double prev = 0.0;
    for (double u1 : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double m = conditional_mean(c.conditional_partial_cdf(u1));
        CHECK(m > prev);
        prev = m;
    }
}

TEST_CASE("inverse_conditional") {
    const PiecewiseLinear id{{0, 1}, {0, 1}};
    for (double U : {0.01, 0.4, 0.99}) CHECK(inverse_conditional(id, U) == U);
    const PiecewiseLinear two{{0, 0.5, 1}, {0, 0.8, 1}};
    CHECK(inverse_conditional(two, 0.4) == doctest::Approx(0.25).epsilon(1e-15));

    RandomStream r(100, 0, rng_domain::oracle);
    for (int set = 0; set < 20; ++set) {
        const std::size_t k = 2 + static_cast<std::size_t>(r.uniform() * 40);
        std::vector<double> x{0.0}, y{0.0};
        for (std::size_t i = 1; i < k; ++i) {
            x.push_back(x.back() + 0.01 + r.uniform());
            y.push_back(y.back() + 0.01 + r.uniform());
        }
        for (auto& v : x) v /= x.back();
        for (auto& v : y) v /= y.back();
        const PiecewiseLinear f{x, y};
        for (int i = 0; i < 1000; ++i) {
            const double U = r.uniform();
            CHECK(std::abs(f(inverse_conditional(f, U)) - U) <= 1e-12);
        }
    }
    CHECK_THROWS_AS(inverse_conditional(two, 1.5), DomainError);
}

TEST_CASE("tail curves of closed forms") {
    const auto grid = probability_grid(0.02, 0.98, 0.02);
    REQUIRE(grid.size() == 49);
    CHECK(grid.back() == 0.98);
    const auto ind = tail_dependence_curves([](double a, double b) { return a * b; }, grid);
    const auto com = tail_dependence_curves([](double a, double b) { return std::min(a, b); }, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(ind.lower[i] == doctest::Approx(grid[i]).epsilon(1e-12));
        // (1 - 2u + u^2)/(1 - u) = 1 - u.
        CHECK(ind.upper[i] == doctest::Approx(1.0 - grid[i]).epsilon(1e-12));
        CHECK(com.lower[i] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(com.upper[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rank-based tail curves match a direct count") {
    const auto pairs = gaussian_pairs(997, 0.4, 110);
    const auto grid = probability_grid(0.05, 0.95, 0.05);
    const auto tc = tail_dependence_curves(pairs, grid);
    const std::size_t n = pairs.size();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double u = grid[g];
        const auto k = static_cast<std::size_t>(std::floor(u * n));
        std::size_t both_lo = 0, both_hi = 0;
        for (const auto& p : pairs) {
            std::size_t r = 1, s = 1;
            for (const auto& q : pairs) {
                r += q.prev < p.prev ? 1 : 0;
                s += q.next < p.next ? 1 : 0;
            }
            both_lo += (r <= k && s <= k) ? 1 : 0;
            both_hi += (r > k && s > k) ? 1 : 0;
        }
        CHECK(tc.lower[g] == doctest::Approx(std::min(1.0, both_lo / (n * u))).epsilon(1e-14));
        CHECK(tc.upper[g] == doctest::Approx(std::min(1.0, both_hi / (n * (1 - u)))).epsilon(1e-14));
    }
}

TEST_CASE("tail curves of an independence copula built from data") {
    const auto pairs = uniform_pairs(50000, 120);
    const EmpiricalAutocopula c(build_partition(pairs, default_target_per_rect(pairs.size())));
    const auto grid = probability_grid(0.05, 0.95, 0.01);
    const auto tc = tail_dependence_curves([&](double a, double b) { return c.evaluate(a, b); }, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(tc.lower[i] - grid[i]) <= 0.03);
        CHECK(std::abs(tc.upper[i] - (1.0 - grid[i])) <= 0.03);
    }
}

TEST_CASE("construction is deterministic") {
    const auto pairs = gaussian_pairs(4000, 0.3, 130);
    const EmpiricalAutocopula a(build_partition(pairs, 20));
    const EmpiricalAutocopula b(build_partition(pairs, 20));
    CHECK(std::equal(a.partition().rects().begin(), a.partition().rects().end(), b.partition().rects().begin(),
                     b.partition().rects().end()));
    CHECK(std::equal(a.p1_knots().begin(), a.p1_knots().end(), b.p1_knots().begin(), b.p1_knots().end()));
    CHECK(std::equal(a.p2_knots().begin(), a.p2_knots().end(), b.p2_knots().begin(), b.p2_knots().end()));
}

TEST_CASE("copula density integrates to the leaf masses") {
    const auto p = build_partition(gaussian_pairs(2000, 0.5, 140), 16);
    const EmpiricalAutocopula c(p);
    for (const auto& q : p.rects()) {
        const double x = 0.5 * (q.u1_lo + q.u1_hi), y = 0.5 * (q.u2_lo + q.u2_hi);
        CHECK(c.density(x, y) == doctest::Approx(q.count / (p.total_count() * q.area())).epsilon(1e-12));
        CHECK(c.density(x, y) > 0.0);
    }
}

TEST_CASE("mass table is exact on heavily tied data") {
    std::vector<PitPair> tied(400, PitPair{0.5, 0.5});
    RandomStream r(7, 0, rng_domain::oracle);
    for (std::size_t i = 0; i < 200; ++i) tied[i] = {std::round(r.uniform() * 10) / 10, std::round(r.uniform() * 10) / 10};
    const EmpiricalAutocopula c(build_partition(tied, 8));
    const std::size_t nx = c.p1_knots().size();
    const std::size_t ny = c.p2_knots().size();
    std::size_t negative = 0;
    for (std::size_t i = 1; i < nx; ++i)
        for (std::size_t j = 1; j < ny; ++j)
            negative += c.mass(i, j) - c.mass(i - 1, j) - c.mass(i, j - 1) + c.mass(i - 1, j - 1) < 0.0;
    CHECK(negative == 0);
    CHECK(c.mass(nx - 1, ny - 1) == 1.0);
    CHECK(c.evaluate(1.0, 1.0) == 1.0);
}
