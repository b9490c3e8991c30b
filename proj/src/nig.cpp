#include "acop/nig.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "acop/special.hpp"
#include "gauss_legendre.hpp"

namespace acop {

namespace {

constexpr std::size_t kGaussNodes = 20;
constexpr double kTailMassBound = 1e-17;
constexpr double kMaxLogChangePerPanel = 8.0;
constexpr std::size_t kMaxPanelsPerSide = 100000;

std::string describe(const NigParams& p) {
    std::ostringstream os;
    os.precision(17);
    os << "(mu=" << p.mu() << ", alpha=" << p.alpha() << ", beta=" << p.beta() << ", delta=" << p.delta() << ")";
    return os.str();
}

}  // namespace

NigParams::NigParams(double mu, double alpha, double beta, double delta)
    : mu_(mu), alpha_(alpha), beta_(beta), delta_(delta), gamma_(0.0) {
    if (!std::isfinite(mu) || !std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(delta)) {
        throw std::invalid_argument("NIG parameters must be finite");
    }
    if (!(delta > 0.0)) throw std::invalid_argument("NIG parameters: delta must be > 0");
    if (!(std::abs(beta) < alpha)) throw std::invalid_argument("NIG parameters: require 0 <= |beta| < alpha");
    gamma_ = std::sqrt((alpha - beta) * (alpha + beta));
    if (!(gamma_ > 0.0)) throw std::invalid_argument("NIG parameters: gamma underflows to zero");
}

simd::NigKernelParams NigParams::kernel_params() const noexcept {
    return {mu_, alpha_, beta_, delta_, std::log(delta_ * alpha_ / std::numbers::pi) + delta_ * gamma_};
}

double ig_pdf(const IgParams& p, double y) {
    if (!(p.shape > 0.0) || !(p.rate > 0.0)) throw std::invalid_argument("IG parameters must be > 0");
    if (!(y > 0.0)) throw DomainError("ig_pdf: y must be > 0, got " + std::to_string(y));
    const double dev = p.shape - p.rate * y;
    const double log_f = std::log(p.shape) - 0.5 * std::log(2.0 * std::numbers::pi * p.rate) - 1.5 * std::log(y) -
                         dev * dev / (2.0 * p.rate * y);
    return std::exp(log_f);
}

double nig_log_pdf(const NigParams& p, double x) {
    const double d = x - p.mu();
    const double r = std::hypot(p.delta(), d);
    return std::log(p.delta() * p.alpha() / std::numbers::pi) + p.delta() * p.gamma() + p.beta() * d - std::log(r) +
           log_bessel_k1(p.alpha() * r);
}

double nig_pdf(const NigParams& p, double x) { return std::exp(nig_log_pdf(p, x)); }

// ---------------------------------------------------------------------------
// NigDistribution

NigDistribution::NigDistribution(const NigParams& params, QuantileOptions options)
    : params_(params), kernel_(params.kernel_params()), options_(options) {
    if (!(options_.clamp > 0.0 && options_.clamp < 0.5)) {
        throw std::invalid_argument("quantile clamp must lie in (0, 0.5)");
    }
    const double mu = params_.mu();
    const double alpha = params_.alpha();
    const double beta = params_.beta();
    const double delta = params_.delta();

    // Outward panel masses for one side; sign = +1 (right) or -1 (left).
    auto build_side = [&](double sign, std::vector<double>& side_edges, std::vector<double>& side_mass) {
        double dist = 0.0;
        for (std::size_t k = 0;; ++k) {
            if (k == kMaxPanelsPerSide) {
                throw NumericError("NIG CDF table did not reach its tail cutoff for " + describe(params_));
            }
            const double scale = std::max(delta, dist);
            const double width =
                std::min(scale, kMaxLogChangePerPanel / (alpha + std::abs(beta) + 2.0 / scale));
            const double a = mu + sign * dist;
            const double b = mu + sign * (dist + width);
            side_mass.push_back(sign > 0 ? integrate(a, b) : integrate(b, a));
            side_edges.push_back(b);
            dist += width;

            const double r = std::hypot(delta, dist);
            const double decay = alpha * dist / r - sign * beta;
            if (decay > 0.0) {
                const double f_edge = std::exp(nig_log_pdf(params_, b));
                if (f_edge / decay < kTailMassBound) break;
            }
        }
    };

    std::vector<double> left_edges, left_mass, right_edges, right_mass;
    build_side(-1.0, left_edges, left_mass);
    build_side(+1.0, right_edges, right_mass);

    edges_.reserve(left_edges.size() + right_edges.size() + 1);
    cumulative_.reserve(edges_.capacity());
    edges_.assign(left_edges.rbegin(), left_edges.rend());
    edges_.push_back(mu);
    edges_.insert(edges_.end(), right_edges.begin(), right_edges.end());

    double acc = 0.0;
    cumulative_.push_back(acc);
    for (auto it = left_mass.rbegin(); it != left_mass.rend(); ++it) {
        acc += *it;
        cumulative_.push_back(acc);
    }
    for (double m : right_mass) {
        acc += m;
        cumulative_.push_back(acc);
    }
    if (!std::isfinite(acc) || std::abs(acc - 1.0) > 1e-9) {
        throw NumericError("NIG density integrates to " + std::to_string(acc) + " for " + describe(params_));
    }
}

double NigDistribution::integrate(double a, double b) const {
    const auto& rule = detail::gauss_legendre_20();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    std::array<double, kGaussNodes> x;
    std::array<double, kGaussNodes> f;
    for (std::size_t i = 0; i < kGaussNodes; ++i) x[i] = mid + half * rule.nodes[i];
    simd::kernels().nig_pdf(kernel_, x, f);
    double sum = 0.0;
    for (std::size_t i = 0; i < kGaussNodes; ++i) sum += rule.weights[i] * f[i];
    return sum * half;
}

double NigDistribution::pdf(double x) const { return std::exp(log_pdf(x)); }

double NigDistribution::log_pdf(double x) const { return nig_log_pdf(params_, x); }

std::size_t NigDistribution::panel_of(double x) const {
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    const auto idx = static_cast<std::size_t>(it - edges_.begin());
    return std::clamp<std::size_t>(idx, 1, edges_.size() - 1) - 1;
}

double NigDistribution::cdf(double x) const {
    if (std::isnan(x)) throw DomainError("nig cdf: x is NaN");
    if (x <= edges_.front()) return 0.0;
    if (x >= edges_.back()) return std::min(1.0, cumulative_.back());
    const std::size_t i = panel_of(x);
    const double v = cumulative_[i] + integrate(edges_[i], x);
    return std::clamp(v, 0.0, 1.0);
}

double NigDistribution::quantile(double q) const {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("nig quantile: q must lie in (0,1), got " + std::to_string(q));
    const double target = std::clamp(q, options_.clamp, 1.0 - options_.clamp);
    if (target > cumulative_.back()) {
        throw NumericError("nig quantile: probability " + std::to_string(target) + " beyond tabulated mass for " +
                           describe(params_));
    }
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
    i = std::clamp<std::size_t>(i, 1, cumulative_.size() - 1) - 1;

    double lo = edges_[i];
    double hi = edges_[i + 1];
    const double base = cumulative_[i];
    const double panel_mass = cumulative_[i + 1] - base;
    const double want = target - base;
    double x = panel_mass > 0.0 ? lo + (hi - lo) * std::clamp(want / panel_mass, 0.0, 1.0) : 0.5 * (lo + hi);

    for (int iter = 0; iter < 200; ++iter) {
        const double g = integrate(edges_[i], x) - want;
        if (std::abs(g) <= 1e-15) return x;
        if (g > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) return x;
        const double f = pdf(x);
        double next = f > 0.0 ? x - g / f : lo - 1.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    throw NumericError("nig quantile: root finding did not converge for q=" + std::to_string(q) + " and " +
                       describe(params_));
}

double nig_cdf(const NigParams& p, double x) { return NigDistribution(p).cdf(x); }

double nig_inv_cdf(const NigParams& p, double q, const QuantileOptions& options) {
    return NigDistribution(p, options).quantile(q);
}

// ---------------------------------------------------------------------------
// Moments

MomentSet moments_from_params(const NigParams& p) {
    const double a = p.alpha();
    const double b = p.beta();
    const double d = p.delta();
    const double g = p.gamma();
    MomentSet m;
    m.mean = p.mu() + d * b / g;
    m.variance = d * a * a / (g * g * g);
    m.skewness = 3.0 * b / (a * std::sqrt(d * g));
    m.excess_kurtosis = 3.0 * (1.0 + 4.0 * b * b / (a * a)) / (d * g);
    return m;
}

NigParams params_from_moments(const MomentSet& m) {
    if (!(m.variance > 0.0) || !std::isfinite(m.variance)) {
        throw DomainError("inadmissible moments: variance must be > 0");
    }
    const double s2 = m.skewness * m.skewness;
    const double k = m.excess_kurtosis;
    if (!(3.0 * k > 5.0 * s2) || !std::isfinite(k) || !std::isfinite(m.skewness)) {
        throw DomainError("inadmissible moments: require 3*excess_kurtosis > 5*skewness^2 (got excess_kurtosis=" +
                          std::to_string(k) + ", skewness=" + std::to_string(m.skewness) + ")");
    }
    // With rho = beta / alpha:  skew^2 / kurt = 3 rho^2 / (1 + 4 rho^2).
    const double rho2 = s2 / (3.0 * k - 4.0 * s2);
    const double delta_gamma = 3.0 * (1.0 + 4.0 * rho2) / k;
    const double gamma = std::sqrt(delta_gamma / (m.variance * (1.0 - rho2)));
    const double delta = delta_gamma / gamma;
    const double alpha = gamma / std::sqrt(1.0 - rho2);
    const double beta = std::copysign(std::sqrt(rho2), m.skewness) * alpha;
    const double mu = m.mean - delta * beta / gamma;
    return NigParams(mu, alpha, beta, delta);
}

double log_likelihood(const NigParams& p, std::span<const double> data) {
    if (data.empty()) throw std::invalid_argument("log_likelihood: empty data");
    return simd::kernels().nig_log_likelihood(p.kernel_params(), data);
}

MomentSet sample_moments(std::span<const double> data) {
    if (data.size() < 2) throw std::invalid_argument("sample_moments: need at least 2 observations");
    const double n = static_cast<double>(data.size());
    double sum = 0.0;
    for (double x : data) sum += x;
    const double mean = sum / n;
    const auto s = simd::kernels().central_sums(data, mean);
    const double m2 = s.s2 / n;
    const double m3 = s.s3 / n;
    const double m4 = s.s4 / n;
    MomentSet m;
    m.mean = mean;
    m.variance = m2;
    m.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    m.excess_kurtosis = m2 > 0.0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    return m;
}

NigParams fit_moment_matching(std::span<const double> data) { return params_from_moments(sample_moments(data)); }

// ---------------------------------------------------------------------------
// Maximum likelihood

MleConvergenceError::MleConvergenceError(const NigParams& best, double best_log_likelihood)
    : NumericError("NIG maximum likelihood did not converge; best so far " + describe(best)),
      best_(best),
      best_ll_(best_log_likelihood) {}

namespace {

std::array<double, 4> to_unconstrained(const NigParams& p) {
    return {p.mu(), std::log(p.delta()), std::asinh(p.beta() / p.gamma()), std::log(p.gamma())};
}

NigParams from_unconstrained(std::span<const double> t) {
    const double gamma = std::exp(t[3]);
    return NigParams(t[0], gamma * std::cosh(t[2]), gamma * std::sinh(t[2]), std::exp(t[1]));
}

}  // namespace

MleFit fit_mle(std::span<const double> data, const NigParams& init, const MleOptions& options) {
    if (data.empty()) throw std::invalid_argument("fit_mle: empty data");
    const double n = static_cast<double>(data.size());
    const auto& k = simd::kernels();

    auto objective = [&](std::span<const double> t) {
        try {
            const NigParams p = from_unconstrained(t);
            return -k.nig_log_likelihood(p.kernel_params(), data) / n;
        } catch (const std::invalid_argument&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const auto start = to_unconstrained(init);
    const double scale = std::sqrt(moments_from_params(init).variance);
    const std::array<double, 4> step{0.1 * scale, 0.2, 0.1, 0.2};
    const auto res = nelder_mead(objective, std::vector<double>(start.begin(), start.end()), step, options.optimizer);

    NigParams best = from_unconstrained(res.x);
    const double ll = -res.f * n;
    if (!res.converged) throw MleConvergenceError(best, ll);
    // The optimiser never moves away from a better vertex, but recompute at
    // init so the monotone-improvement contract holds exactly.
    const double ll_init = log_likelihood(init, data);
    if (ll < ll_init) best = init;
    return {best, std::max(ll, ll_init), res.iterations, res.evaluations};
}

DeltaFit fit_delta_given_shape(std::span<const double> data, const NigParams& shape, double log_tolerance) {
    if (data.empty()) throw std::invalid_argument("fit_delta_given_shape: empty data");
    const auto& k = simd::kernels();
    auto neg_ll = [&](double log_delta) {
        const NigParams p = shape.with_delta(std::exp(log_delta));
        const double ll = k.nig_log_likelihood(p.kernel_params(), data);
        return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
    };

    // Coarse scan: 81 points spanning a factor 1e8 around the starting delta,
    // extended while the optimum sits on the boundary.
    constexpr int kGrid = 81;
    constexpr double kHalfSpan = 4.0 * std::numbers::ln10;
    double centre = std::log(shape.delta());
    double step = 2.0 * kHalfSpan / (kGrid - 1);
    for (int attempt = 0; attempt < 8; ++attempt) {
        int best_i = 0;
        double best_f = std::numeric_limits<double>::infinity();
        for (int i = 0; i < kGrid; ++i) {
            const double f = neg_ll(centre - kHalfSpan + step * i);
            if (f < best_f) {
                best_f = f;
                best_i = i;
            }
        }
        if (best_i == 0 || best_i == kGrid - 1) {
            centre += (best_i == 0 ? -1.0 : 1.0) * kHalfSpan;
            continue;
        }
        const double lo = centre - kHalfSpan + step * (best_i - 1);
        const double hi = centre - kHalfSpan + step * (best_i + 1);
        const auto m = golden_section_minimize(neg_ll, lo, hi, log_tolerance);
        if (m.f <= best_f) return {std::exp(m.x), -m.f};
        return {std::exp(centre - kHalfSpan + step * best_i), -best_f};
    }
    throw NumericError("delta likelihood has no interior maximum within 1e-16..1e16 of the starting value");
}

}  // namespace acop
