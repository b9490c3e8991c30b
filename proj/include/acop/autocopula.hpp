#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "acop/calendar.hpp"
#include "acop/marginal.hpp"
#include "acop/series.hpp"

namespace acop {

/// PIT values are kept away from 0 and 1 by this margin.
inline constexpr double kPitClamp = 1e-9;

struct PitSeries {
    std::vector<Date> dates;
    std::vector<double> values;  // each in [kPitClamp, 1 - kPitClamp]
};

/// v_t = F_t(x_t), clamped. Errors from the marginal (e.g. a date without a
/// distribution) propagate.
PitSeries pit_transform(const ObservationSeries& data, const MarginalModel& marginal);

struct PitPair {
    double prev;  // v_{t-1}
    double next;  // v_t
};

/// Unit-lag pairs; only observations exactly one day apart are paired.
std::vector<PitPair> lag_pairs(const PitSeries& pit);
/// Consecutive pairs of a gap-free sequence.
std::vector<PitPair> lag_pairs(std::span<const double> values);

struct Rect {
    double u1_lo;
    double u1_hi;
    double u2_lo;
    double u2_hi;
    std::size_t count;

    [[nodiscard]] double area() const noexcept { return (u1_hi - u1_lo) * (u2_hi - u2_lo); }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Leaves of an equal-count partition of the unit square.
class RectPartition {
public:
    RectPartition() = default;
    /// Checks counts >= 1, bounds inside [0,1] and that the total matches.
    /// Exact tiling is verified when the joint CDF is built.
    RectPartition(std::vector<Rect> rects, std::size_t total_count);

    [[nodiscard]] std::span<const Rect> rects() const noexcept { return rects_; }
    [[nodiscard]] std::size_t size() const noexcept { return rects_.size(); }
    [[nodiscard]] std::size_t total_count() const noexcept { return total_; }

private:
    std::vector<Rect> rects_;
    std::size_t total_ = 0;
};

/// max(32, ceil(n / 256)).
std::size_t default_target_per_rect(std::size_t pair_count);

/// Alternating-axis median splits (first axis: prev) until every leaf holds
/// at most `target_per_rect` points. The split sits midway between the two
/// middle coordinates. Tied coordinates are first spread by at most 1e-12 so
/// that every split separates points. Requires target_per_rect >= 1 and at
/// least 4 * target_per_rect pairs (DataError otherwise).
RectPartition build_partition(std::span<const PitPair> pairs, std::size_t target_per_rect);

/// Strictly increasing piecewise-linear function on [0,1] given by knots.
struct PiecewiseLinear {
    std::vector<double> x;
    std::vector<double> y;

    [[nodiscard]] double operator()(double u) const;
};

/// u with f(u) = target, by bisection over the knots and linear interpolation.
/// target must lie in [f(0), f(1)].
double inverse_conditional(const PiecewiseLinear& f, double target);

enum class ConditioningMode {
    cumulative,  // u -> C(u1, u) / u1
    partial,     // u -> dC/du1 (u1, u)
};

/// Unit-lag copula as used by the path simulator. v-space is the PIT scale;
/// u-space is the copula's uniform scale (identical for closed forms).
class Autocopula {
public:
    virtual ~Autocopula() = default;
    [[nodiscard]] virtual double evaluate(double u1, double u2) const = 0;
    /// v -> u1 (Phi1).
    [[nodiscard]] virtual double phi1(double v) const = 0;
    /// u2 -> v (Phi2^-1).
    [[nodiscard]] virtual double phi2_inverse(double u) const = 0;
    /// Inverse of the conditional law of u2 given u1, evaluated at U.
    [[nodiscard]] virtual double sample_conditional(double u1, double uniform, ConditioningMode mode) const = 0;
};

/// Empirical autocopula. Phi is the piecewise-bilinear joint CDF of the
/// partition's piecewise-constant density on the refined grid (all distinct
/// leaf edges); Phi1, Phi2 are its margins and C(u1, u2) =
/// Phi(Phi1^-1(u1), Phi2^-1(u2)). Immutable after construction.
class EmpiricalAutocopula final : public Autocopula {
public:
    /// Throws NumericError if the leaves do not tile the square exactly or the
    /// refined grid is too large.
    explicit EmpiricalAutocopula(RectPartition partition);

    [[nodiscard]] const RectPartition& partition() const noexcept { return partition_; }

    // Joint CDF and density in v-space.
    [[nodiscard]] double phi(double x, double y) const;
    [[nodiscard]] double density(double x, double y) const;
    [[nodiscard]] double phi1(double x) const override;
    [[nodiscard]] double phi2(double y) const;
    [[nodiscard]] double phi1_inverse(double u) const;
    [[nodiscard]] double phi2_inverse(double u) const override;

    /// C(u1, u2) for u1, u2 in [0,1].
    [[nodiscard]] double evaluate(double u1, double u2) const override;
    /// c(u1, u2), the copula density (constant on each mapped refined cell).
    [[nodiscard]] double copula_density(double u1, double u2) const;

    /// u -> C(u1, u)/u1, knots at the Phi2 images of the grid. u1 in (0,1].
    [[nodiscard]] PiecewiseLinear conditional_cdf(double u1) const;
    /// u -> dC/du1 (u1, u) from the bilinear cell containing u1 (right-hand
    /// cell at a knot). u1 in [0,1].
    [[nodiscard]] PiecewiseLinear conditional_partial_cdf(double u1) const;
    /// inverse of the selected conditional at U in (0,1), without building the
    /// function. For the cumulative mode in the first grid column the limit
    /// u1 -> 0 coincides with the partial form and is used there.
    [[nodiscard]] double sample_conditional(double u1, double uniform, ConditioningMode mode) const override;

    [[nodiscard]] std::span<const double> x_edges() const noexcept { return x_edges_; }
    [[nodiscard]] std::span<const double> y_edges() const noexcept { return y_edges_; }
    [[nodiscard]] std::span<const double> p1_knots() const noexcept { return p1_; }
    [[nodiscard]] std::span<const double> p2_knots() const noexcept { return p2_; }
    /// Cumulative mass at grid corner (i, j) = Phi(x_i, y_j).
    [[nodiscard]] double mass(std::size_t i, std::size_t j) const noexcept { return mass_[i * y_edges_.size() + j]; }

private:
    [[nodiscard]] std::size_t column_of(double u1) const;
    [[nodiscard]] double conditional_knot(std::size_t i, double t, double u1, std::size_t j, ConditioningMode mode) const;

    RectPartition partition_;
    std::vector<double> x_edges_;
    std::vector<double> y_edges_;
    std::vector<double> mass_;     // (nx) x (ny), row-major in x
    std::vector<double> density_;  // (nx-1) x (ny-1)
    std::vector<double> p1_;       // Phi1 at x_edges_
    std::vector<double> p2_;       // Phi2 at y_edges_
};

/// Refuse grids above this many corners.
inline constexpr std::size_t kMaxRefinedGridCorners = 50'000'000;

using CopulaFunction = std::function<double(double, double)>;

struct TailCurves {
    std::vector<double> grid;
    std::vector<double> lower;  // C(u,u)/u
    std::vector<double> upper;  // (1 - 2u + C(u,u))/(1-u)
};

/// Rank-based step empirical copula of the pairs: with k = floor(u n),
/// lower(u) = #{R <= k, S <= k}/(n u), upper(u) = #{R > k, S > k}/(n (1-u)).
/// Values clamped to [0,1]. Grid values must lie in (0,1).
TailCurves tail_dependence_curves(std::span<const PitPair> pairs, std::span<const double> grid);
/// From a copula: lower = C(u,u)/u, upper = (1 - C(1,u) - C(u,1) + C(u,u))/(1-u).
TailCurves tail_dependence_curves(const CopulaFunction& copula, std::span<const double> grid);

/// {start, start+step, ...} up to stop inclusive (rounded to the step).
std::vector<double> probability_grid(double start, double stop, double step);

}  // namespace acop
