#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "acop/error.hpp"
#include "acop/optimize.hpp"
#include "acop/simd/kernels.hpp"

namespace acop {

/// Normal-inverse-Gaussian parameters. Invariants (checked on construction):
/// delta > 0 and 0 <= |beta| < alpha. gamma = sqrt(alpha^2 - beta^2) is
/// derived and never stored externally.
class NigParams {
public:
    /// Throws std::invalid_argument if the invariants do not hold.
    NigParams(double mu, double alpha, double beta, double delta);

    [[nodiscard]] double mu() const noexcept { return mu_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }

    [[nodiscard]] NigParams with_delta(double delta) const { return {mu_, alpha_, beta_, delta}; }
    [[nodiscard]] simd::NigKernelParams kernel_params() const noexcept;

    friend bool operator==(const NigParams& a, const NigParams& b) noexcept {
        return a.mu_ == b.mu_ && a.alpha_ == b.alpha_ && a.beta_ == b.beta_ && a.delta_ == b.delta_;
    }

private:
    double mu_;
    double alpha_;
    double beta_;
    double delta_;
    double gamma_;
};

/// Inverse Gaussian in shape/rate form:
/// f(y) = shape / sqrt(2 pi rate) * y^{-3/2} * exp(-(shape - rate y)^2 / (2 rate y)).
struct IgParams {
    double shape;
    double rate;
};

struct MomentSet {
    double mean = 0.0;
    double variance = 1.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

double ig_pdf(const IgParams& p, double y);

double nig_pdf(const NigParams& p, double x);
double nig_log_pdf(const NigParams& p, double x);

/// Options for quantile evaluation: probabilities closer than `clamp` to 0 or
/// 1 are moved to [clamp, 1 - clamp] before inversion.
struct QuantileOptions {
    double clamp = 1e-12;
};

/// A NIG law with a precomputed panel table for its CDF.
///
/// The real line is cut into panels graded away from mu: widths grow with the
/// distance from mu (the density's complex singularities sit at mu +- i delta)
/// and are capped so that the exponential factor changes by at most e^8 across
/// one panel. Each panel is integrated with 20-point Gauss-Legendre. Panels are
/// added outward until an analytic bound on the remaining tail mass,
/// f(x) / (alpha |x - mu| / r - sign * beta), drops below 1e-17.
/// Immutable after construction.
class NigDistribution {
public:
    explicit NigDistribution(const NigParams& params, QuantileOptions options = {});

    [[nodiscard]] const NigParams& params() const noexcept { return params_; }
    [[nodiscard]] double pdf(double x) const;
    [[nodiscard]] double log_pdf(double x) const;
    /// Absolute error below 1e-12 in practice; monotone nondecreasing.
    [[nodiscard]] double cdf(double x) const;
    /// x with |cdf(x) - q| <= 1e-12 (after clamping). q must lie in (0,1).
    [[nodiscard]] double quantile(double q) const;
    [[nodiscard]] double median() const { return quantile(0.5); }

    /// Integral of the density over the tabulated support.
    [[nodiscard]] double total_mass() const noexcept { return cumulative_.back(); }
    [[nodiscard]] std::size_t panel_count() const noexcept { return edges_.size() - 1; }
    [[nodiscard]] double support_lo() const noexcept { return edges_.front(); }
    [[nodiscard]] double support_hi() const noexcept { return edges_.back(); }

private:
    [[nodiscard]] double integrate(double a, double b) const;
    [[nodiscard]] std::size_t panel_of(double x) const;

    NigParams params_;
    simd::NigKernelParams kernel_;
    QuantileOptions options_;
    std::vector<double> edges_;
    std::vector<double> cumulative_;  // mass left of each edge
};

double nig_cdf(const NigParams& p, double x);
double nig_inv_cdf(const NigParams& p, double q, const QuantileOptions& options = {});

/// Closed-form mean, variance, skewness and excess kurtosis.
MomentSet moments_from_params(const NigParams& p);

/// Inverse of moments_from_params. Requires variance > 0 and
/// 3 * excess_kurtosis > 5 * skewness^2; throws DomainError naming the
/// violated condition otherwise.
NigParams params_from_moments(const MomentSet& m);

/// Sum of log densities. Throws std::invalid_argument on empty data.
double log_likelihood(const NigParams& p, std::span<const double> data);

/// Sample moments with central moments m_k = (1/n) sum (x - mean)^k,
/// skewness m3 / m2^{3/2}, excess kurtosis m4 / m2^2 - 3.
MomentSet sample_moments(std::span<const double> data);

NigParams fit_moment_matching(std::span<const double> data);

struct MleOptions {
    /// Tolerance applies to the mean log-likelihood per observation.
    NelderMeadOptions optimizer{};
};

struct MleFit {
    NigParams params;
    double log_likelihood;
    std::size_t iterations;
    std::size_t evaluations;
};

/// Raised when the optimiser exhausts its iteration budget; carries the best
/// point found so far.
class MleConvergenceError : public NumericError {
public:
    MleConvergenceError(const NigParams& best, double best_log_likelihood);
    [[nodiscard]] const NigParams& best() const noexcept { return best_; }
    [[nodiscard]] double best_log_likelihood() const noexcept { return best_ll_; }

private:
    NigParams best_;
    double best_ll_;
};

/// Maximum likelihood over all four parameters, started from `init`.
/// Searches over (mu, log delta, eta, log gamma) with alpha = gamma cosh eta,
/// beta = gamma sinh eta, which maps R^4 onto the valid parameter region.
/// The returned log-likelihood is never below that of `init`.
MleFit fit_mle(std::span<const double> data, const NigParams& init, const MleOptions& options = {});

/// One-dimensional MLE in delta with (mu, alpha, beta) held fixed:
/// log-grid scan then golden-section refinement on log delta.
struct DeltaFit {
    double delta;
    double log_likelihood;
};
DeltaFit fit_delta_given_shape(std::span<const double> data, const NigParams& shape, double log_tolerance = 1e-8);

}  // namespace acop
