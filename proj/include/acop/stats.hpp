#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace acop {

/// Linear-interpolation quantile (Hyndman-Fan type 7) of ascending data.
/// `p` in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

/// Quantiles at several levels (each in [0,1]); sorts a copy of `data`.
std::vector<double> quantiles(std::span<const double> data, std::span<const double> levels);

/// Ordinal ranks 1..n; ties keep input order.
std::vector<std::int32_t> ordinal_ranks(std::span<const double> data);

/// One-sample Kolmogorov-Smirnov statistic against Uniform(0,1).
double ks_statistic_uniform(std::span<const double> data);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic critical value of sqrt(n_eff) * D at significance `level`
/// (Kolmogorov distribution): sqrt(-ln(level / 2) / 2).
double ks_critical_value(double level);

double mean(std::span<const double> data);

/// Lag-1 sample autocorrelation with the usual (biased) normalisation.
double lag1_autocorrelation(std::span<const double> data);

}  // namespace acop
