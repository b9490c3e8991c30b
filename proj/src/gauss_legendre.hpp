#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace acop::detail {

template <std::size_t N>
struct GaussLegendreRule {
    std::array<double, N> nodes{};    // on [-1, 1], ascending
    std::array<double, N> weights{};
};

/// Nodes and weights by Newton iteration on the Legendre recurrence.
template <std::size_t N>
GaussLegendreRule<N> make_gauss_legendre() {
    GaussLegendreRule<N> rule;
    for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * static_cast<double>(j) + 1.0) * z * p1 - static_cast<double>(j) * p2) /
                     (static_cast<double>(j) + 1.0);
            }
            dp = static_cast<double>(N) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[N - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[N - 1 - i] = w;
    }
    return rule;
}

inline const GaussLegendreRule<20>& gauss_legendre_20() {
    static const auto rule = make_gauss_legendre<20>();
    return rule;
}

}  // namespace acop::detail
