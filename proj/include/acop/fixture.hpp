#pragma once

#include <cstdint>
#include <filesystem>

#include "acop/calendar.hpp"
#include "acop/seasonal_delta.hpp"
#include "acop/series.hpp"

namespace acop {

/// Ground truth of the synthetic fixture:
///   x_t ~ NIG(mu, alpha, beta, delta_{month(t)}) marginally,
///   sqrt(delta) follows nu_{k+1} = a nu_k + b(k) + sigma z with
///     b(k) = (1 - a)(1 + amp cos(2 pi k / 12)), k = YearMonth::index(),
///   and the PIT sequence is a Markov chain whose unit-lag copula is Student-t
///   with correlation rho and dof degrees of freedom (tail dependent).
struct FixtureSpec {
    Date start = Date{std::chrono::year{2010} / 1 / 1};
    int years = 10;
    double mu = 0.0;
    double alpha = 1.2;
    double beta = 0.3;
    double nu_a = 0.5;
    double nu_amplitude = 0.35;
    double nu_sigma = 0.08;
    double t_rho = 0.5;
    double t_dof = 3.0;
    std::uint64_t seed = 20100101;

    [[nodiscard]] NuArModel nu_model() const;
};

struct Fixture {
    ObservationSeries series;
    MonthlyDeltaSeries deltas;  // true monthly deltas
    std::vector<double> pit;    // true PIT values
};

Fixture generate_fixture(const FixtureSpec& spec = {});

/// Writes `date,value` CSV preceded by a '#' line describing the generating parameters.
void write_fixture_csv(const std::filesystem::path& path, const Fixture& fixture, const FixtureSpec& spec);

}  // namespace acop
