#pragma once

// Scalar K1 evaluation shared by special.cpp and the scalar kernel table.

#include <array>
#include <cmath>
#include <cstddef>

#include "k1_chebyshev.hpp"

namespace acop::detail {

/// Clenshaw recurrence for sum c_k T_k(t).
template <std::size_t N>
inline double chebyshev_sum(const std::array<double, N>& c, double t) noexcept {
    const double t2 = 2.0 * t;
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t k = N - 1; k >= 1; --k) {
        const double b0 = t2 * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return t * b1 - b2 + c[0];
}

inline constexpr double kK1RegimeSplit = 2.0;

/// K1(x) for 0 < x <= 2.
inline double k1_small(double x) noexcept {
    const double t = 0.5 * x * x - 1.0;
    const double i1_over_x = chebyshev_sum(kK1SmallI1, t);
    const double rest = chebyshev_sum(kK1SmallRest, t);
    return std::log(0.5 * x) * x * i1_over_x + rest / x;
}

/// sqrt(x) e^x K1(x) for x >= 2.
inline double k1_large_scaled_sqrt(double x) noexcept {
    return chebyshev_sum(kK1LargeScaled, 4.0 / x - 1.0);
}

inline double log_k1(double x) noexcept {
    if (x <= kK1RegimeSplit) return std::log(k1_small(x));
    return std::log(k1_large_scaled_sqrt(x)) - 0.5 * std::log(x) - x;
}

}  // namespace acop::detail
