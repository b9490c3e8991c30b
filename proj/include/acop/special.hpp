#pragma once

namespace acop {

/// Modified Bessel function of the second kind, order one. x > 0.
/// Relative error below 1e-14 on [1e-6, 700].
double bessel_k1(double x);

/// Exponentially scaled form e^x K1(x); finite for all x > 0.
double bessel_k1e(double x);

/// log K1(x) without underflow for large x.
double log_bessel_k1(double x);

/// Standard normal CDF and quantile.
double normal_cdf(double z);
double normal_quantile(double p);

}  // namespace acop
