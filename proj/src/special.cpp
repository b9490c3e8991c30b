#include "acop/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "acop/error.hpp"
#include "k1_eval.hpp"

namespace acop {

namespace {

void require_positive(double x, const char* what) {
    if (!(x > 0.0)) {
        throw DomainError(std::string(what) + ": argument must be > 0, got " + std::to_string(x));
    }
}

}  // namespace

double bessel_k1(double x) {
    require_positive(x, "bessel_k1");
    if (std::isinf(x)) return 0.0;
    if (x <= detail::kK1RegimeSplit) return detail::k1_small(x);
    return detail::k1_large_scaled_sqrt(x) / std::sqrt(x) * std::exp(-x);
}

double bessel_k1e(double x) {
    require_positive(x, "bessel_k1e");
    if (std::isinf(x)) return 0.0;
    if (x <= detail::kK1RegimeSplit) return detail::k1_small(x) * std::exp(x);
    return detail::k1_large_scaled_sqrt(x) / std::sqrt(x);
}

double log_bessel_k1(double x) {
    require_positive(x, "log_bessel_k1");
    if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
    return detail::log_k1(x);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal_quantile: p must lie in (0,1), got " + std::to_string(p));
    }
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace acop
