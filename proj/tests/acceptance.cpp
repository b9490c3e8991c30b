// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <spdlog/spdlog.h>

#include "acop/autocopula.hpp"
#include "acop/nig.hpp"
#include "acop/pipeline.hpp"
#include "acop/rng.hpp"
#include "acop/seasonal_delta.hpp"
#include "acop/simulator.hpp"
#include "oracles.hpp"

using namespace acop;
namespace fs = std::filesystem;

namespace {

const fs::path kCli = ACOP_CLI_PATH;
const fs::path kSource = ACOP_SOURCE_DIR;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("acop_acceptance_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PipelineConfig fixture_config(const fs::path& out) {
    auto cfg = load_config(kSource / "configs" / "fixture.json");
    cfg.output_dir = out;
    return cfg;
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

double lag1(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= x.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        den += (x[i] - m) * (x[i] - m);
        if (i > 0) num += (x[i] - m) * (x[i - 1] - m);
    }
    return num / den;
}

// 1 -------------------------------------------------------------------------

Outcome nig_correctness() {
    Outcome o;
    std::vector<NigParams> sets{NigParams(0.0980, 0.0131, 0.0122, 2.3799)};
    RandomStream r(2024, 0, rng_domain::oracle);
    while (sets.size() < 101) {
        const double alpha = 0.1 + 4.9 * r.uniform();
        sets.emplace_back(4.0 * r.uniform() - 2.0, alpha, alpha * (1.9 * r.uniform() - 0.95), 0.1 + 4.9 * r.uniform());
    }
    const std::vector<double> qs{1e-6, 1e-3, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999, 1 - 1e-6};
    double worst_mass = 0.0, worst_inv = 0.0, worst_mom = 0.0;
    for (const auto& p : sets) {
        const oracle::Nig op{p.mu(), p.alpha(), p.beta(), p.delta()};
        const double mass = oracle::integrate_line([&](double x) { return nig_pdf(p, x); }, p.mu(), p.delta() + 1.0 / p.alpha());
        const NigDistribution d(p);
        worst_mass = std::max({worst_mass, std::abs(mass - 1.0), std::abs(d.total_mass() - 1.0)});
        for (double q : qs) worst_inv = std::max(worst_inv, std::abs(d.cdf(d.quantile(q)) - q));
        const auto cf = moments_from_params(p);
        const auto qm = oracle::nig_moments(op);
        const double sd = std::sqrt(qm.variance);
        // Location and skewness can be near zero; scale them by sd and 1.
        const double e_mean = std::abs(cf.mean - qm.mean) / std::max(std::abs(qm.mean), sd);
        const double e_var = std::abs(cf.variance / qm.variance - 1.0);
        const double e_skew = std::abs(cf.skewness - qm.skewness) / std::max(1.0, std::abs(qm.skewness));
        const double e_kurt = std::abs(cf.excess_kurtosis / qm.excess_kurtosis - 1.0);
        worst_mom = std::max({worst_mom, e_mean, e_var, e_skew, e_kurt});
    }
    o.require(worst_mass <= 1e-6, "mass error " + num(worst_mass));
    o.require(worst_inv <= 1e-6, "cdf(inv) error " + num(worst_inv));
    o.require(worst_mom <= 1e-5, "moment error " + num(worst_mom));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("max |mass-1| ") + num(worst_mass) + ", max |F(F^-1(q))-q| " +
                num(worst_inv) + ", max moment rel err " + num(worst_mom) + " over 101 sets";
    return o;
}

// 2 -------------------------------------------------------------------------

Outcome calibration_recovery() {
    Outcome o;
    const NigParams truth(1.0, 1.0, 0.6, 1.0);
    const NigDistribution d(truth);
    RandomStream r(4242, 0, rng_domain::oracle);
    std::vector<double> x(50000);
    for (auto& v : x) v = d.quantile(r.uniform());
    const auto fit = fit_mle(x, fit_moment_matching(x)).params;
    const double e[4] = {fit.mu() / truth.mu() - 1, fit.alpha() / truth.alpha() - 1, fit.beta() / truth.beta() - 1,
                         fit.delta() / truth.delta() - 1};
    const char* names[4] = {"mu", "alpha", "beta", "delta"};
    std::string errs;
    for (int k = 0; k < 4; ++k) {
        o.require(std::abs(e[k]) < 0.05, std::string(names[k]) + " off by " + num(e[k]));
        errs += std::string(k ? ", " : "") + names[k] + " " + num(e[k]);
    }

    // Two alternating months at 500 points each.
    std::vector<MonthSample> months;
    for (int m = 0; m < 2; ++m) {
        const NigDistribution dm(truth.with_delta(m == 0 ? 1.0 : 4.0));
        MonthSample s{YearMonth::from_index(2015 * 12 + m), {}};
        for (int i = 0; i < 500; ++i) s.values.push_back(dm.quantile(r.uniform()));
        months.push_back(std::move(s));
    }
    const auto md = fit_monthly_delta(months, truth);
    const double e1 = md.entries()[0].delta / 1.0 - 1.0;
    const double e4 = md.entries()[1].delta / 4.0 - 1.0;
    o.require(std::abs(e1) < 0.10 && std::abs(e4) < 0.10, "monthly delta off");
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("MLE rel err ") + errs + "; monthly delta rel err " +
                num(e1) + ", " + num(e4);
    return o;
}

// 3 -------------------------------------------------------------------------

void copula_axioms(const EmpiricalAutocopula& c, double& boundary, double& min_cell, double& grounding) {
    for (int i = 0; i <= 1000; ++i) {
        const double u = i / 1000.0;
        boundary = std::max({boundary, std::abs(c.evaluate(u, 1.0) - u), std::abs(c.evaluate(1.0, u) - u),
                             std::abs(c.evaluate(u, 0.0)), std::abs(c.evaluate(0.0, u))});
    }
    const auto p1 = c.p1_knots();
    const auto p2 = c.p2_knots();
    std::vector<double> prev(p2.size()), cur(p2.size());
    for (std::size_t j = 0; j < p2.size(); ++j) prev[j] = c.evaluate(p1[0], p2[j]);
    for (std::size_t i = 1; i < p1.size(); ++i) {
        for (std::size_t j = 0; j < p2.size(); ++j) cur[j] = c.evaluate(p1[i], p2[j]);
        for (std::size_t j = 1; j < p2.size(); ++j)
            min_cell = std::min(min_cell, static_cast<double>((static_cast<long double>(cur[j]) - cur[j - 1]) - (static_cast<long double>(prev[j]) - prev[j - 1])));
        std::swap(prev, cur);
    }
    const auto& part = c.partition();
    for (const auto& q : part.rects()) {
        const double a1 = c.phi1(q.u1_lo), b1 = c.phi1(q.u1_hi), a2 = c.phi2(q.u2_lo), b2 = c.phi2(q.u2_hi);
        const double m = c.evaluate(b1, b2) - c.evaluate(a1, b2) - c.evaluate(b1, a2) + c.evaluate(a1, a2);
        grounding = std::max(grounding, std::abs(m - static_cast<double>(q.count) / part.total_count()));
    }
}

Outcome copula_axioms_all() {
    Outcome o;
    std::vector<std::pair<std::string, EmpiricalAutocopula>> cs;
    {
        const auto cfg = fixture_config(scratch("c3"));
        ModelBundle b;
        const auto data = stage_ingest(cfg);
        stage_fit_marginal(cfg, data, b);
        stage_fit_seasonal(cfg, data, b);
        const auto pit = stage_pit(data, b);
        const auto pairs = lag_pairs(pit);
        cs.emplace_back("fixture target 8", EmpiricalAutocopula(build_partition(pairs, 8)));
        cs.emplace_back("fixture default target", EmpiricalAutocopula(build_partition(pairs, default_target_per_rect(pairs.size()))));
    }
    {
        RandomStream r(3, 0, rng_domain::oracle);
        std::vector<PitPair> u(50000);
        for (auto& p : u) p = {r.uniform(), r.uniform()};
        cs.emplace_back("uniform 50000", EmpiricalAutocopula(build_partition(u, default_target_per_rect(u.size()))));
    }
    cs.emplace_back("gaussian 0.7", EmpiricalAutocopula(build_partition(gaussian_pairs(10000, 0.7, 5), 16)));
    cs.emplace_back("gaussian -0.4", EmpiricalAutocopula(build_partition(gaussian_pairs(3000, -0.4, 6), 8)));
    {
        std::vector<PitPair> tied(400, PitPair{0.5, 0.5});
        RandomStream r(7, 0, rng_domain::oracle);
        for (std::size_t i = 0; i < 200; ++i) tied[i] = {std::round(r.uniform() * 10) / 10, std::round(r.uniform() * 10) / 10};
        cs.emplace_back("heavily tied", EmpiricalAutocopula(build_partition(tied, 8)));
    }
    cs.emplace_back("quadrants (2,1,1,2)",
                    EmpiricalAutocopula(RectPartition({{0, 0.5, 0, 0.5, 2}, {0.5, 1, 0, 0.5, 1}, {0, 0.5, 0.5, 1, 1}, {0.5, 1, 0.5, 1, 2}}, 6)));
    double boundary = 0.0, min_cell = 1.0, grounding = 0.0;
    for (const auto& [name, c] : cs) {
        double b = 0.0, m = 1.0, g = 0.0;
        copula_axioms(c, b, m, g);
        o.require(b <= 1e-12, name + ": boundary " + num(b));
        o.require(m >= 0.0, name + ": negative cell mass " + num(m));
        o.require(g <= 1e-10, name + ": grounding " + num(g));
        boundary = std::max(boundary, b);
        min_cell = std::min(min_cell, m);
        grounding = std::max(grounding, g);
    }
    o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(cs.size()) + " copulas, max boundary err " +
                num(boundary) + ", min cell mass " + num(min_cell) + ", max grounding err " + num(grounding);
    return o;
}

// 4 -------------------------------------------------------------------------

Outcome ar1_oracle() {
    Outcome o;
    const std::size_t n = 100000;
    for (double alpha : {0.0, 0.4, 0.8}) {
        const Ar1Spec spec{alpha, 0.3, 1.0};
        const auto res = ar1_gaussian_copula_oracle(spec, n, 99);
        const double rd = lag1(res.direct), rf = lag1(res.framework);
        const double var = spec.stationary_variance();
        const double se_mean = std::sqrt(var * (1 + alpha) / (1 - alpha) / n);
        const double se_var = var * std::sqrt(2 * (1 + alpha * alpha) / (1 - alpha * alpha) / n);
        double mean = 0.0, v = 0.0;
        for (double x : res.framework) mean += x;
        mean /= n;
        for (double x : res.framework) v += (x - mean) * (x - mean);
        v /= n;
        const std::string tag = "alpha " + num(alpha) + ": ";
        o.require(std::abs(rd - rf) <= 0.02, tag + "lag-1 gap " + num(rd - rf));
        o.require(std::abs(rf - alpha) <= 0.02, tag + "framework lag-1 " + num(rf));
        o.require(std::abs(mean - spec.stationary_mean()) < 3 * se_mean, tag + "mean z " + num((mean - spec.stationary_mean()) / se_mean));
        o.require(std::abs(v - var) < 3 * se_var, tag + "variance z " + num((v - var) / se_var));
        o.detail += (o.detail.empty() ? "" : "; ") + tag + "lag-1 direct " + num(rd) + " framework " + num(rf) +
                    ", mean z " + num((mean - spec.stationary_mean()) / se_mean) + ", var z " + num((v - var) / se_var);
    }
    return o;
}

// 5 -------------------------------------------------------------------------

Outcome independence() {
    Outcome o;
    RandomStream r(55, 0, rng_domain::oracle);
    std::vector<PitPair> u(50000);
    for (auto& p : u) p = {r.uniform(), r.uniform()};
    const EmpiricalAutocopula c(build_partition(u, default_target_per_rect(u.size())));
    double worst = 0.0;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) worst = std::max(worst, std::abs(c.evaluate(i / 20.0, j / 20.0) - i * j / 400.0));
    o.require(worst <= 0.02, "max |C - uv| " + num(worst));
    const auto grid = probability_grid(0.05, 0.95, 0.01);
    const auto tc = tail_dependence_curves([&](double a, double b) { return c.evaluate(a, b); }, grid);
    double lo = 0.0, up = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        lo = std::max(lo, std::abs(tc.lower[i] - grid[i]));
        // The upper curve of the independence copula is (1 - 2u + u^2)/(1 - u) = 1 - u.
        up = std::max(up, std::abs(tc.upper[i] - (1.0 - grid[i])));
    }
    o.require(lo <= 0.03, "lower tail dev " + num(lo));
    o.require(up <= 0.03, "upper tail dev " + num(up));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("max |C - uv| ") + num(worst) + ", lower dev " + num(lo) +
                ", upper dev " + num(up);
    return o;
}

// 6 -------------------------------------------------------------------------

Outcome end_to_end() {
    Outcome o;
    auto cfg = fixture_config(scratch("e2e"));
    cfg.seasonal.fan_paths = 0;
    const auto res = run_pipeline(cfg);
    o.require(res.ensemble && res.ensemble->path_count == 100, "expected 100 paths");
    o.require(res.tails.coverage.has_value(), "no band coverage");
    if (res.tails.coverage) {
        o.require(res.tails.coverage->lower >= 0.9, "lower coverage " + num(res.tails.coverage->lower));
        o.require(res.tails.coverage->upper >= 0.9, "upper coverage " + num(res.tails.coverage->upper));
        o.detail += (o.detail.empty() ? "" : "; ") + std::string("partial conditioning, coverage lower ") +
                    num(res.tails.coverage->lower) + " upper " + num(res.tails.coverage->upper) + " on " +
                    std::to_string(res.tails.data.grid.size()) + " grid points";
    }
    // Diagnostic only: the cumulative conditioning on the same fit.
    auto cum = cfg;
    cum.output_dir = scratch("e2e_cumulative");
    cum.copula.conditioning = ConditioningMode::cumulative;
    const auto rc = run_pipeline(cum);
    if (rc.tails.coverage) {
        o.detail += "; diagnostic cumulative coverage lower " + num(rc.tails.coverage->lower) + " upper " +
                    num(rc.tails.coverage->upper);
    }
    return o;
}

// 7 -------------------------------------------------------------------------

Outcome delta_fan(double& fan_seconds) {
    Outcome o;
    const auto cfg = fixture_config(scratch("fan"));
    ModelBundle b;
    const auto data = stage_ingest(cfg);
    stage_fit_marginal(cfg, data, b);
    stage_fit_seasonal(cfg, data, b);
    const auto& model = *b.nu_ar;
    DeltaSimulationRequest req;
    req.last_observed = b.monthly_delta->entries().back().month;
    req.nu0 = std::sqrt(b.monthly_delta->entries().back().delta);
    req.horizon_months = 120;
    req.path_count = 20000;
    req.seed = 4;
    const auto t0 = std::chrono::steady_clock::now();
    const auto sim = simulate_delta_paths(model, req);
    fan_seconds = seconds_since(t0);
    o.require(fan_seconds < 60.0, "fan took " + num(fan_seconds) + " s");
    std::size_t bad = 0;
    for (std::size_t m = 0; m < sim.fan.months.size(); ++m)
        for (std::size_t l = 1; l < sim.fan.levels.size(); ++l) bad += sim.fan.value(m, l) < sim.fan.value(m, l - 1);
    o.require(bad == 0, std::to_string(bad) + " non-monotone fan entries");

    NuArModel flat = model;
    flat.variance_coeffs = {};
    flat.sigma_floor = 0.0;
    const auto det = simulate_delta_paths(flat, req);
    double nu = req.nu0;
    int t = req.last_observed.index();
    std::size_t mismatch = 0;
    for (std::size_t m = 0; m < 120; ++m, ++t) {
        nu = std::max(flat.a * nu + flat.drift(t), kNuFloor);
        for (std::size_t l = 0; l < det.fan.levels.size(); ++l) mismatch += det.fan.value(m, l) != nu * nu;
    }
    o.require(mismatch == 0, std::to_string(mismatch) + " degenerate fan entries differ from the deterministic path");
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("20000 x 120 months in ") + num(fan_seconds) +
                " s, fan monotone, sigma=0 fan equals the deterministic path exactly";
    return o;
}

// 8 -------------------------------------------------------------------------

Outcome determinism() {
    Outcome o;
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const std::string cfg = (kSource / "configs" / "fixture.json").string();
    for (const auto& dir : {a, b}) {
        const std::string cmd = kCli.string() + " pipeline -c " + cfg + " -o " + dir.string() + " >/dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        o.require(rc == 0, "CLI exit status " + std::to_string(rc));
    }
    std::size_t files = 0, differ = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        ++files;
        if (!fs::exists(b / e.path().filename()) || slurp(e.path()) != slurp(b / e.path().filename())) {
            ++differ;
            o.require(false, e.path().filename().string() + " differs");
        }
    }
    o.require(files >= 12, "only " + std::to_string(files) + " files");
    o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(files) + " files compared, " + std::to_string(differ) +
                " differ";
    return o;
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::warn);
    struct Criterion {
        int id;
        const char* name;
        double budget_s;  // 0: no runtime bound
        std::function<Outcome()> run;
    };
    double fan_seconds = 0.0;
    const std::vector<Criterion> criteria{
        {1, "NIG correctness", 30.0, nig_correctness},
        {2, "calibration recovery", 120.0, calibration_recovery},
        {3, "copula axioms", 0.0, copula_axioms_all},
        {4, "AR(1) Gaussian-copula oracle", 60.0, ar1_oracle},
        {5, "independence sanity", 0.0, independence},
        {6, "end-to-end tail bands", 600.0, end_to_end},
        {7, "delta fan", 0.0, [&] { return delta_fan(fan_seconds); }},
        {8, "determinism", 0.0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double s = seconds_since(t0);
        if (c.budget_s > 0.0 && s >= c.budget_s) {
            o.pass = false;
            o.detail += "; runtime " + num(s) + " s exceeds " + num(c.budget_s) + " s";
        }
        std::printf("criterion %d %s: %s (%.2f s) %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", s, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
