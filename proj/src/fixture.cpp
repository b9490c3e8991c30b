#include "acop/fixture.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>

#include "acop/error.hpp"
#include "acop/marginal.hpp"
#include "acop/rng.hpp"
#include "acop/serialize.hpp"

namespace acop {

NuArModel FixtureSpec::nu_model() const {
    NuArModel m;
    m.a = nu_a;
    m.mean_coeffs[0] = 1.0 - nu_a;
    m.mean_coeffs[1] = (1.0 - nu_a) * nu_amplitude;
    m.variance_coeffs[0] = nu_sigma * nu_sigma;
    m.sigma_floor = nu_sigma;
    return m;
}

Fixture generate_fixture(const FixtureSpec& spec) {
    if (spec.years < 1) throw std::invalid_argument("fixture: years must be >= 1");
    const Date end = Date{std::chrono::year_month_day{spec.start} + std::chrono::years{spec.years}};
    const auto days = static_cast<std::size_t>((end - spec.start).count());
    const YearMonth first = year_month_of(spec.start);
    const YearMonth last = year_month_of(end - std::chrono::days{1});
    const auto months = static_cast<std::size_t>(last.index() - first.index() + 1);

    // Monthly deltas, started from the stationary mean of nu at the first month.
    const auto model = spec.nu_model();
    RandomStream delta_rng(spec.seed, 0, rng_domain::fixture);
    const double nu_start = 1.0 + spec.nu_amplitude * std::cos(2.0 * std::numbers::pi * (first.index() - 1) / 12.0);
    const auto path = simulate_delta_path(model, YearMonth::from_index(first.index() - 1), nu_start, months, delta_rng);
    std::vector<MonthlyDelta> deltas;
    for (std::size_t k = 0; k < months; ++k) deltas.push_back({YearMonth::from_index(first.index() + static_cast<int>(k)), path[k]});
    MonthlyDeltaSeries delta_series(deltas);

    const NigParams shared(spec.mu, spec.alpha, spec.beta, 1.0);
    const SeasonalNigMarginal marginal(shared, delta_series, false);

    // Student-t Markov chain: z_t | z_{t-1} = rho z + sqrt((1-rho^2)(dof + z^2)/(dof+1)) T_{dof+1}.
    const boost::math::students_t t_marg(spec.t_dof);
    const boost::math::students_t t_cond(spec.t_dof + 1.0);
    RandomStream rng(spec.seed, 1, rng_domain::fixture);
    Fixture fx;
    fx.deltas = delta_series;
    fx.pit.resize(days);
    std::vector<Observation> obs(days);
    double z = boost::math::quantile(t_marg, rng.uniform());
    const double rho = spec.t_rho;
    for (std::size_t t = 0; t < days; ++t) {
        if (t > 0) {
            const double scale = std::sqrt((1.0 - rho * rho) * (spec.t_dof + z * z) / (spec.t_dof + 1.0));
            z = rho * z + scale * boost::math::quantile(t_cond, rng.uniform());
        }
        const double v = std::clamp(boost::math::cdf(t_marg, z), 1e-15, 1.0 - 1e-15);
        fx.pit[t] = v;
        const Date d = spec.start + std::chrono::days{static_cast<int>(t)};
        obs[t] = {d, marginal.quantile(d, v)};
    }
    fx.series = ObservationSeries(std::move(obs));
    return fx;
}

void write_fixture_csv(const std::filesystem::path& path, const Fixture& fixture, const FixtureSpec& spec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << "# synthetic fixture: NIG(mu=" << format_double(spec.mu) << ", alpha=" << format_double(spec.alpha)
        << ", beta=" << format_double(spec.beta) << ") with monthly delta = nu^2, nu AR a=" << format_double(spec.nu_a)
        << " amplitude=" << format_double(spec.nu_amplitude) << " sigma=" << format_double(spec.nu_sigma)
        << "; Student-t lag-1 copula rho=" << format_double(spec.t_rho) << " dof=" << format_double(spec.t_dof)
        << "; seed=" << spec.seed << '\n';
    out << "date,value\n";
    for (const auto& r : fixture.series.records()) out << format_date(r.date) << ',' << format_double(r.value) << '\n';
    if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace acop
