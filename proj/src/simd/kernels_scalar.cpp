#include <cmath>
#include <numbers>

#include "../k1_eval.hpp"
#include "tables.hpp"

namespace acop::simd {

NigKernelParams make_nig_kernel_params(double mu, double alpha, double beta, double delta) noexcept {
    const double gamma = std::sqrt(alpha * alpha - beta * beta);
    return {mu, alpha, beta, delta, std::log(delta * alpha / std::numbers::pi) + delta * gamma};
}

namespace {

inline double nig_log_pdf_one(const NigKernelParams& p, double x) noexcept {
    const double d = x - p.mu;
    const double r = std::hypot(p.delta, d);
    return p.log_norm + p.beta * d - std::log(r) + acop::detail::log_k1(p.alpha * r);
}

void log_bessel_k1(std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = acop::detail::log_k1(x[i]);
}

void nig_log_pdf(const NigKernelParams& p, std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = nig_log_pdf_one(p, x[i]);
}

void nig_pdf(const NigKernelParams& p, std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(nig_log_pdf_one(p, x[i]));
}

double nig_log_likelihood(const NigKernelParams& p, std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += nig_log_pdf_one(p, v);
    return sum;
}

CentralSums central_sums(std::span<const double> x, double center) {
    CentralSums s;
    for (double v : x) {
        const double d = v - center;
        const double d2 = d * d;
        s.s2 += d2;
        s.s3 += d2 * d;
        s.s4 += d2 * d2;
    }
    return s;
}

JointTailCounts joint_tail_counts(std::span<const std::int32_t> r1, std::span<const std::int32_t> r2,
                                  std::int32_t k) {
    JointTailCounts c;
    for (std::size_t i = 0; i < r1.size(); ++i) {
        c.lower += (r1[i] <= k && r2[i] <= k) ? 1 : 0;
        c.upper += (r1[i] > k && r2[i] > k) ? 1 : 0;
    }
    return c;
}

constexpr KernelTable kScalarTable{
    Isa::scalar, &log_bessel_k1, &nig_log_pdf, &nig_pdf, &nig_log_likelihood, &central_sums, &joint_tail_counts,
};

}  // namespace

namespace detail {
const KernelTable& scalar_table() noexcept { return kScalarTable; }
}  // namespace detail

}  // namespace acop::simd
